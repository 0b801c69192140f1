// Command-line front end. Exit codes: 0 success, 2 usage or config problems,
// 3 domain errors (invalid rate constants, no stationary point, insufficient
// event budget, points off the slow manifold, ...).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mmlab/beta_sweep.hpp"
#include "mmlab/errors.hpp"
#include "mmlab/lna.hpp"
#include "mmlab/params.hpp"
#include "mmlab/slow_manifold.hpp"
#include "mmlab/ssa.hpp"
#include "mmlab/vector_fields.hpp"

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter intake shared by every subcommand that needs rate constants:
// either --config with a JSON object holding exactly {k0, eT, k1, k2, km1,
// omega}, or the individual flags; flags override config values.
struct ParamsInput {
    std::string config;
    std::optional<double> k0, eT, k1, k2, km1, omega;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config, "JSON file with keys k0, eT, k1, k2, km1, omega");
        cmd->add_option("--k0", k0, "substrate influx");
        cmd->add_option("--eT", eT, "total enzyme");
        cmd->add_option("--k1", k1, "binding rate constant");
        cmd->add_option("--k2", k2, "catalytic rate constant");
        cmd->add_option("--km1", km1, "dissociation rate constant");
        cmd->add_option("--omega", omega, "system volume (counts per concentration)");
    }

    mmlab::Parameters resolve() const {
        mmlab::Parameters p;
        bool have = false;
        if (!config.empty()) {
            std::ifstream in(config);
            if (!in) throw UsageError("cannot open config file: " + config);
            nlohmann::json j;
            try {
                in >> j;
                p = j.get<mmlab::Parameters>();
            } catch (const nlohmann::json::exception& e) {
                throw UsageError("config file " + config + ": " + e.what());
            }
            have = true;
        }
        if (k0) p.k0 = *k0;
        if (eT) p.e_T = *eT;
        if (k1) p.k1 = *k1;
        if (k2) p.k2 = *k2;
        if (km1) p.k_m1 = *km1;
        if (omega) p.omega = *omega;
        if (!have && !(k0 && eT && k1 && k2 && km1))
            throw UsageError("parameters missing: pass --config or all of "
                             "--k0 --eT --k1 --k2 --km1");
        return p;
    }
};

struct OutputTarget {
    std::string path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--out", path, "output file (default: stdout)");
    }

    // Keeps the ofstream alive; returns cout when no path was given.
    std::ostream& open(std::unique_ptr<std::ofstream>& holder) const {
        if (path.empty()) return std::cout;
        holder = std::make_unique<std::ofstream>(path);
        if (!*holder) throw UsageError("cannot open output file: " + path);
        return *holder;
    }
};

nlohmann::json qualifiers_json(const mmlab::Parameters& p) {
    const mmlab::DerivedConstants d = mmlab::derive(p);
    const mmlab::FixedPoint fp = mmlab::fixed_point(p); // errors when alpha >= 1
    const mmlab::RegimeReport r = mmlab::classify_regime(p);
    nlohmann::json j;
    j["params"] = p;
    j["K_M"] = d.K_M;
    j["K_S"] = d.K_S;
    j["v"] = d.v;
    j["t_C"] = d.t_C;
    j["t_S"] = d.t_S;
    j["eps_ss"] = d.eps_ss;
    j["alpha"] = d.alpha;
    j["beta"] = d.beta;
    j["lambda"] = d.lambda;
    j["eps"] = *d.eps;
    j["gamma"] = fp.gamma;
    j["nu"] = fp.nu;
    j["discrepancy"] = r.discrepancy;
    j["classification"] = mmlab::to_string(r.classification);
    j["nearest_tfpv"] = mmlab::to_string(r.nearest_tfpv);
    return j;
}

mmlab::VectorFieldKind parse_kind(const std::string& name) {
    using K = mmlab::VectorFieldKind;
    if (name == "full") return K::full_mass_action;
    if (name == "sqssa") return K::sqssa;
    if (name == "linear-sqssa") return K::linear_sqssa;
    if (name == "qea") return K::qea;
    if (name == "qea-special") return K::qea_special;
    if (name == "reverse-closed") return K::reverse_closed;
    if (name == "zero-enzyme") return K::zero_enzyme;
    throw UsageError("unknown vector field kind: " + name);
}

mmlab::TfpvTag parse_tfpv(const std::string& name) {
    using T = mmlab::TfpvTag;
    if (name == "pi1") return T::pi1;
    if (name == "pi3") return T::pi3;
    if (name == "reverse-closed" || name == "reverse_closed") return T::reverse_closed;
    throw UsageError("unknown TFPV tag: " + name);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and analysis lab for the open Michaelis-Menten mechanism"};
    app.require_subcommand(1);
    std::function<void()> action;

    // qualifiers
    {
        auto* cmd = app.add_subcommand(
            "qualifiers", "Dimensionless qualifiers, fixed point and regime classification");
        auto params = std::make_shared<ParamsInput>();
        auto out = std::make_shared<OutputTarget>();
        params->attach(cmd);
        out->attach(cmd);
        cmd->callback([=, &action] {
            action = [=] {
                const nlohmann::json j = qualifiers_json(params->resolve());
                std::unique_ptr<std::ofstream> holder;
                out->open(holder) << j.dump(2) << "\n";
            };
        });
    }

    // lna
    {
        auto* cmd = app.add_subcommand(
            "lna", "Stationary substrate variances (closed form, Lyapunov cross-check)");
        auto params = std::make_shared<ParamsInput>();
        auto out = std::make_shared<OutputTarget>();
        params->attach(cmd);
        out->attach(cmd);
        cmd->callback([=, &action] {
            action = [=] {
                const nlohmann::json j = mmlab::evaluate_lna(params->resolve());
                std::unique_ptr<std::ofstream> holder;
                out->open(holder) << j.dump(2) << "\n";
            };
        });
    }

    // ode
    {
        auto* cmd = app.add_subcommand("ode", "Integrate a deterministic vector field");
        auto params = std::make_shared<ParamsInput>();
        auto out = std::make_shared<OutputTarget>();
        auto kind = std::make_shared<std::string>("full");
        auto s0 = std::make_shared<double>(0.0);
        auto c0 = std::make_shared<double>(0.0);
        auto t_end = std::make_shared<double>(0.0);
        auto step = std::make_shared<std::optional<double>>();
        auto with_product = std::make_shared<bool>(false);
        params->attach(cmd);
        out->attach(cmd);
        cmd->add_option("--kind", *kind,
                        "full|sqssa|linear-sqssa|qea|qea-special|reverse-closed|zero-enzyme");
        cmd->add_option("--s0", *s0, "initial substrate concentration");
        cmd->add_option("--c0", *c0, "initial complex concentration (planar kinds)");
        cmd->add_option("--t-end", *t_end, "integration horizon")->required();
        cmd->add_option("--step", *step, "fixed step (default t_C/20)");
        cmd->add_flag("--with-product", *with_product, "append the product column");
        cmd->callback([=, &action] {
            action = [=] {
                const mmlab::Parameters p = params->resolve();
                const mmlab::VectorFieldKind k = parse_kind(*kind);
                const double h = step->value_or(1.0 / (p.k_m1 + p.k2) / 20.0);
                const mmlab::Trajectory traj =
                    mmlab::integrate(k, {*s0, *c0}, *t_end, h, p, {*with_product});
                std::unique_ptr<std::ofstream> holder;
                mmlab::write_csv(traj, out->open(holder));
            };
        });
    }

    // simulate
    {
        auto* cmd = app.add_subcommand(
            "simulate", "Gillespie simulation of the full or reduced network");
        auto params = std::make_shared<ParamsInput>();
        auto out = std::make_shared<OutputTarget>();
        auto network = std::make_shared<std::string>("full");
        auto seed = std::make_shared<std::uint64_t>(1);
        auto moments = std::make_shared<bool>(false);
        auto budget = std::make_shared<std::uint64_t>(10'000'000);
        auto budget_given = std::make_shared<bool>(false);
        auto quick = std::make_shared<bool>(false);
        auto replicas = std::make_shared<int>(0);
        auto workers = std::make_shared<unsigned>(0);
        auto batches = std::make_shared<int>(32);
        auto burn_rel = std::make_shared<double>(20.0);
        auto burn_time = std::make_shared<std::optional<double>>();
        auto t_end = std::make_shared<std::optional<double>>();
        auto sample_dt = std::make_shared<std::optional<double>>();
        auto ns0 = std::make_shared<std::optional<std::int64_t>>();
        auto nc0 = std::make_shared<std::optional<std::int64_t>>();
        auto np0 = std::make_shared<std::optional<std::int64_t>>();
        params->attach(cmd);
        out->attach(cmd);
        cmd->add_option("--network", *network, "full|reduced");
        cmd->add_option("--seed", *seed, "RNG seed");
        cmd->add_flag("--moments", *moments,
                      "estimate stationary moments instead of sampling a trajectory");
        cmd->add_option("--budget", *budget, "event budget for --moments")
            ->each([=](const std::string&) { *budget_given = true; });
        cmd->add_flag("--quick", *quick, "shrink the default budget to 1e6 events");
        cmd->add_option("--replicas", *replicas,
                        "use an ensemble of this many burn-in replicas for --moments");
        cmd->add_option("--workers", *workers, "threads for --replicas (0 = hardware)");
        cmd->add_option("--batches", *batches, "batch-mean count for --moments");
        cmd->add_option("--burn-in-relaxations", *burn_rel,
                        "burn-in length in slow relaxation times");
        cmd->add_option("--burn-in-time", *burn_time, "burn-in length override, time units");
        cmd->add_option("--t-end", *t_end, "trajectory horizon");
        cmd->add_option("--sample-dt", *sample_dt, "sampling grid (default t_end/1000)");
        cmd->add_option("--ns0", *ns0, "initial substrate count (default: fixed point)");
        cmd->add_option("--nc0", *nc0, "initial complex count (default: fixed point)");
        cmd->add_option("--np0", *np0, "initial product count (default 0)");
        cmd->callback([=, &action] {
            action = [=] {
                if (*network != "full" && *network != "reduced")
                    throw UsageError("unknown network: " + *network);
                const mmlab::Parameters p = params->resolve();
                const mmlab::ReactionNetwork net = *network == "reduced"
                                                       ? mmlab::build_reduced_network(p)
                                                       : mmlab::build_full_network(p);
                std::unique_ptr<std::ofstream> holder;
                if (*moments) {
                    mmlab::MomentOptions mo;
                    mo.batches = *batches;
                    mo.burn_in_relaxations = *burn_rel;
                    mo.burn_in_time = *burn_time;
                    const std::uint64_t n =
                        (*quick && !*budget_given) ? 1'000'000 : *budget;
                    const mmlab::MomentEstimate est =
                        *replicas > 0
                            ? mmlab::replica_moments(net, *replicas, *seed, mo, *workers)
                            : mmlab::stationary_moments(net, n, *seed, mo);
                    out->open(holder) << nlohmann::json(est).dump(2) << "\n";
                    return;
                }
                if (!t_end->has_value())
                    throw UsageError("trajectory mode needs --t-end (or pass --moments)");
                mmlab::CountState x0;
                if (ns0->has_value() || nc0->has_value() || np0->has_value()) {
                    x0 = {ns0->value_or(0), nc0->value_or(0), np0->value_or(0)};
                } else {
                    x0 = mmlab::initial_stationary_state(net);
                }
                const double dt = sample_dt->value_or(**t_end / 1000.0);
                const mmlab::CountTrajectory traj =
                    mmlab::simulate(net, x0, **t_end, dt, *seed);
                if (traj.absorbed)
                    std::cerr << "note: network absorbed before t_end; trailing samples "
                                 "repeat the final state\n";
                mmlab::write_csv(traj, out->open(holder));
            };
        });
    }

    // sweep-beta
    {
        auto* cmd = app.add_subcommand(
            "sweep-beta", "Full vs reduced stationary fluctuations along a beta grid");
        auto out = std::make_shared<OutputTarget>();
        auto opt = std::make_shared<mmlab::SweepOptions>();
        auto quick = std::make_shared<bool>(false);
        auto budget_given = std::make_shared<bool>(false);
        out->attach(cmd);
        cmd->add_option("--betas", opt->betas, "beta grid")->expected(-1);
        cmd->add_option("--alpha", opt->alpha, "load alpha = k0/v for every point");
        cmd->add_option("--budget", opt->budget, "event budget per network and point")
            ->each([=](const std::string&) { *budget_given = true; });
        cmd->add_option("--seed", opt->seed, "master seed");
        cmd->add_option("--replicas", opt->replicas, "ensemble mode with this many replicas");
        cmd->add_option("--workers", opt->workers, "worker threads (0 = hardware)");
        cmd->add_option("--batches", opt->moments.batches, "batch-mean count");
        cmd->add_option("--burn-in-relaxations", opt->moments.burn_in_relaxations,
                        "burn-in length in slow relaxation times");
        cmd->add_flag("--quick", *quick, "shrink the default budget to 1e6 events");
        cmd->callback([=, &action] {
            action = [=] {
                mmlab::SweepOptions o = *opt;
                if (*quick && !*budget_given) o.budget = 1'000'000;
                const std::vector<mmlab::SweepPoint> points = mmlab::run_beta_sweep(o);
                std::unique_ptr<std::ofstream> holder;
                mmlab::write_csv(points, out->open(holder));
            };
        });
    }

    // project
    {
        auto* cmd = app.add_subcommand(
            "project", "Slow-manifold projector and reduced field at manifold points");
        auto params = std::make_shared<ParamsInput>();
        auto out = std::make_shared<OutputTarget>();
        auto tfpv = std::make_shared<std::string>("pi1");
        auto coords = std::make_shared<std::vector<double>>();
        auto delta = std::make_shared<std::optional<double>>();
        params->attach(cmd);
        out->attach(cmd);
        cmd->add_option("--tfpv", *tfpv, "pi1|pi3|reverse-closed");
        cmd->add_option("--coords", *coords,
                        "manifold coordinates: substrate for pi1/pi3, complex for "
                        "reverse-closed")
            ->required()
            ->expected(-1);
        cmd->add_option("--delta", *delta,
                        "compactness margin for reverse-closed (default 0.05*eT)");
        cmd->callback([=, &action] {
            action = [=] {
                const mmlab::Parameters p = params->resolve();
                const mmlab::Factorization F =
                    mmlab::factorization_for(parse_tfpv(*tfpv), p, delta->value_or(-1.0));
                nlohmann::json rows = nlohmann::json::array();
                for (double coord : *coords) {
                    const mmlab::State2 z = F.manifold_point(coord);
                    const mmlab::ProjectionData pd = mmlab::projector_at(F, z);
                    const Eigen::Vector2d red = pd.pi * F.G(z);
                    rows.push_back({{"point", {{"s", z.s}, {"c", z.c}}},
                                    {"pi",
                                     {{pd.pi(0, 0), pd.pi(0, 1)},
                                      {pd.pi(1, 0), pd.pi(1, 1)}}},
                                    {"dfp", pd.dfp},
                                    {"attracting", pd.attracting},
                                    {"reduced_field", {red[0], red[1]}}});
                }
                nlohmann::json j{{"tfpv", mmlab::to_string(F.tfpv)},
                                 {"params", F.params},
                                 {"delta", F.delta},
                                 {"points", rows}};
                std::unique_ptr<std::ofstream> holder;
                out->open(holder) << j.dump(2) << "\n";
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        action();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
