#include "mmlab/ssa.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <ostream>
#include <string>
#include <thread>

#include "mmlab/errors.hpp"
#include "mmlab/vector_fields.hpp"

namespace mmlab {

double ReactionNetwork::total_propensity(const CountState& x) const {
    double a_tot = 0;
    for (const Reaction& r : reactions) a_tot += r.propensity(x, *this);
    return a_tot;
}

namespace {

double influx(const CountState&, const ReactionNetwork& net) {
    return net.params.omega * net.params.k0;
}

double binding(const CountState& x, const ReactionNetwork& net) {
    return net.params.k1 / net.params.omega * static_cast<double>(x.n_S) *
           static_cast<double>(net.enzyme_total - x.n_C);
}

double unbinding(const CountState& x, const ReactionNetwork& net) {
    return net.params.k_m1 * static_cast<double>(x.n_C);
}

double catalysis(const CountState& x, const ReactionNetwork& net) {
    return net.params.k2 * static_cast<double>(x.n_C);
}

double consumption(const CountState& x, const ReactionNetwork& net) {
    const Parameters& p = net.params;
    const double K_M = (p.k_m1 + p.k2) / p.k1;
    const double s = static_cast<double>(x.n_S) / p.omega;
    return p.k2 * p.e_T * static_cast<double>(x.n_S) / (K_M + s);
}

std::int64_t checked_enzyme_total(const Parameters& p, bool& rounded) {
    const double exact = p.e_T * p.omega;
    const std::int64_t total = std::llround(exact);
    rounded = std::abs(exact - static_cast<double>(total)) > 1e-9;
    if (rounded)
        std::cerr << "warning: eT*omega = " << exact << " is not integral, using E_T = "
                  << total << "\n";
    if (total < 1)
        throw InvalidParameterError("E_T = round(eT*omega) = " + std::to_string(total) +
                                    "; need at least one enzyme copy");
    return total;
}

} // namespace

ReactionNetwork build_full_network(const Parameters& p) {
    p.validate();
    ReactionNetwork net;
    net.label = NetworkLabel::full;
    net.params = p;
    net.enzyme_total = checked_enzyme_total(p, net.rounded_enzyme);
    net.reactions = {
        {"influx", {+1, 0, 0}, influx},
        {"binding", {-1, +1, 0}, binding},
        {"unbinding", {+1, -1, 0}, unbinding},
        {"catalysis", {0, -1, +1}, catalysis},
    };
    return net;
}

ReactionNetwork build_reduced_network(const Parameters& p) {
    p.validate();
    ReactionNetwork net;
    net.label = NetworkLabel::reduced;
    net.params = p;
    net.enzyme_total = checked_enzyme_total(p, net.rounded_enzyme);
    net.reactions = {
        {"influx", {+1, 0, 0}, influx},
        {"consumption", {-1, 0, +1}, consumption},
    };
    return net;
}

CountTrajectory simulate(const ReactionNetwork& net, CountState initial, double t_end,
                         double sample_dt, std::uint64_t seed) {
    if (!(sample_dt > 0))
        throw InvalidParameterError("sample_dt must be positive");
    if (!(t_end >= 0))
        throw InvalidParameterError("t_end must be non-negative");
    if (initial.n_S < 0 || initial.n_C < 0 || initial.n_P < 0 ||
        initial.n_C > net.enzyme_total)
        throw InvalidParameterError("initial counts outside the reachable region");

    CountTrajectory traj;
    const std::size_t n_samples =
        static_cast<std::size_t>(std::floor(t_end / sample_dt + 1e-9)) + 1;
    Xoshiro256pp rng(seed);

    CountState x = initial;
    std::size_t next = 0;
    // State is right-continuous: a grid point exactly at a jump time records
    // the post-jump state.
    auto emit_before = [&](double t_limit) {
        while (next < n_samples && static_cast<double>(next) * sample_dt < t_limit) {
            traj.times.push_back(static_cast<double>(next) * sample_dt);
            traj.states.push_back(x);
            ++next;
        }
    };
    auto emit_rest = [&] {
        while (next < n_samples) {
            traj.times.push_back(static_cast<double>(next) * sample_dt);
            traj.states.push_back(x);
            ++next;
        }
    };

    double t = 0;
    while (next < n_samples) {
        const double a_tot = net.total_propensity(x);
        if (!(a_tot > 0)) {
            traj.absorbed = true;
            emit_rest();
            break;
        }
        const double t_next = t + rng.exponential(a_tot);
        emit_before(t_next); // state x holds on [t, t_next)
        if (t_next > t_end) break;
        t = t_next;
        double threshold = rng.uniform() * a_tot;
        std::size_t r = 0;
        for (; r + 1 < net.reactions.size(); ++r) {
            threshold -= net.reactions[r].propensity(x, net);
            if (threshold < 0) break;
        }
        x.n_S += net.reactions[r].change[0];
        x.n_C += net.reactions[r].change[1];
        x.n_P += net.reactions[r].change[2];
    }
    return traj;
}

void write_csv(const CountTrajectory& traj, std::ostream& os) {
    os << "t,n_S,n_C,n_P\n";
    char buf[128];
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%lld,%lld,%lld\n", traj.times[i],
                      static_cast<long long>(traj.states[i].n_S),
                      static_cast<long long>(traj.states[i].n_C),
                      static_cast<long long>(traj.states[i].n_P));
        os << buf;
    }
}

void to_json(nlohmann::json& j, const MomentEstimate& m) {
    j = nlohmann::json{{"mean", m.mean},
                       {"variance", m.variance},
                       {"std", m.std_dev},
                       {"se_mean", m.se_mean},
                       {"se_variance", m.se_variance},
                       {"events", m.events},
                       {"burn_in", m.burn_in},
                       {"seed", m.seed}};
}

double slow_relaxation_rate(const Parameters& p) {
    const FixedPoint fp = fixed_point(p);
    const Eigen::Matrix2d J = jacobian({fp.gamma, fp.nu}, p);
    const double tr = J.trace();
    const double det = J.determinant();
    // tr^2 >= 4 det by AM-GM on the positive parts, so both roots are real.
    const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
    const double fast = 0.5 * (tr - disc);
    return std::abs(det / fast);
}

CountState initial_stationary_state(const ReactionNetwork& net) {
    const FixedPoint fp = fixed_point(net.params);
    CountState x;
    x.n_S = std::llround(fp.gamma * net.params.omega);
    if (net.label == NetworkLabel::full)
        x.n_C = std::min<std::int64_t>(std::llround(fp.nu * net.params.omega),
                                       net.enzyme_total);
    return x;
}

namespace {

struct BurnInPlan {
    CountState initial;
    double t_burn;
};

BurnInPlan plan_burn_in(const ReactionNetwork& net, const MomentOptions& opts) {
    const double rate = slow_relaxation_rate(net.params);
    return {initial_stationary_state(net),
            opts.burn_in_time.value_or(opts.burn_in_relaxations / rate)};
}

MomentEstimate point_mass(const CountState& x, std::uint64_t events, double burn_in,
                          std::uint64_t seed) {
    MomentEstimate m;
    m.mean = static_cast<double>(x.n_S);
    m.events = events;
    m.burn_in = burn_in;
    m.seed = seed;
    return m;
}

double sd_of(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

} // namespace

MomentEstimate stationary_moments(const ReactionNetwork& net, std::uint64_t budget_events,
                                  std::uint64_t seed, const MomentOptions& opts) {
    if (opts.batches < 2)
        throw InvalidParameterError("need at least 2 batches");
    const auto [initial, t_burn] = plan_burn_in(net, opts);
    const int B = opts.batches;

    Xoshiro256pp rng(seed);
    const auto noop = [](double, const CountState&, const CountState&, int) {};
    const SsaRunResult warm = run_ssa(net, initial, 0.0, t_burn, budget_events, rng, noop);
    if (warm.absorbed) return point_mass(warm.state, warm.events, t_burn, seed);
    if (warm.t < t_burn)
        throw InsufficientBudgetError(
            "budget of " + std::to_string(budget_events) + " events exhausted at t = " +
            std::to_string(warm.t) + " of a " + std::to_string(t_burn) +
            " time-unit burn-in");
    const std::uint64_t remaining = budget_events - warm.events;
    if (remaining < static_cast<std::uint64_t>(B))
        throw InsufficientBudgetError(
            "only " + std::to_string(remaining) + " events left after burn-in; need at "
            "least one per batch (" + std::to_string(B) + ")");

    // Weighted moments of n_S - center accumulated per equal-event batch;
    // centering kills the cancellation in E[x^2] - E[x]^2.
    const double center = static_cast<double>(warm.state.n_S);
    std::vector<double> w(B, 0.0), wx(B, 0.0), wx2(B, 0.0);
    const std::uint64_t base = remaining / B;
    const std::uint64_t extra = remaining % B;
    std::uint64_t in_batch = 0;
    int batch = 0;
    auto batch_size = [&](int k) {
        return base + (static_cast<std::uint64_t>(k) < extra ? 1 : 0);
    };
    const auto accumulate = [&](double tau, const CountState& before, const CountState&,
                                int) {
        const double x = static_cast<double>(before.n_S) - center;
        w[batch] += tau;
        wx[batch] += tau * x;
        wx2[batch] += tau * x * x;
        if (++in_batch == batch_size(batch)) {
            ++batch;
            in_batch = 0;
        }
    };
    const SsaRunResult run =
        run_ssa(net, warm.state, warm.t, std::numeric_limits<double>::infinity(),
                remaining, rng, accumulate);
    if (run.absorbed) return point_mass(run.state, run.events + warm.events, t_burn, seed);

    double W = 0, WX = 0, WX2 = 0;
    for (int k = 0; k < B; ++k) {
        W += w[k];
        WX += wx[k];
        WX2 += wx2[k];
    }
    const double m1 = WX / W;
    const double var = WX2 / W - m1 * m1;

    std::vector<double> batch_mean(B), batch_var(B);
    for (int k = 0; k < B; ++k) {
        if (!(w[k] > 0)) {
            batch_mean[k] = center + m1;
            batch_var[k] = var;
            continue;
        }
        const double e1 = wx[k] / w[k];
        const double e2 = wx2[k] / w[k];
        batch_mean[k] = center + e1;
        // Uses the global mean so the weighted batch average reproduces var.
        batch_var[k] = e2 - 2.0 * m1 * e1 + m1 * m1;
    }

    MomentEstimate m;
    m.mean = center + m1;
    m.variance = var;
    m.std_dev = std::sqrt(std::max(var, 0.0));
    m.se_mean = sd_of(batch_mean) / std::sqrt(static_cast<double>(B));
    m.se_variance = sd_of(batch_var) / std::sqrt(static_cast<double>(B));
    m.events = budget_events;
    m.burn_in = t_burn;
    m.seed = seed;
    return m;
}

MomentEstimate replica_moments(const ReactionNetwork& net, int replicas,
                               std::uint64_t seed, const MomentOptions& opts,
                               unsigned workers) {
    if (replicas < 2)
        throw InvalidParameterError("need at least 2 replicas");
    const auto [initial, t_burn] = plan_burn_in(net, opts);
    const int R = replicas;

    std::vector<double> sample(R);
    std::vector<std::uint64_t> used(R);
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(R));

    std::atomic<int> cursor{0};
    const auto noop = [](double, const CountState&, const CountState&, int) {};
    auto body = [&] {
        for (int r = cursor.fetch_add(1); r < R; r = cursor.fetch_add(1)) {
            Xoshiro256pp rng(hash64(seed, static_cast<std::uint64_t>(r)));
            const SsaRunResult res =
                run_ssa(net, initial, 0.0, t_burn,
                        std::numeric_limits<std::uint64_t>::max(), rng, noop);
            sample[r] = static_cast<double>(res.state.n_S);
            used[r] = res.events;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < workers; ++i) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();

    double mean = 0;
    for (double x : sample) mean += x;
    mean /= R;
    double ss = 0;
    for (double x : sample) ss += (x - mean) * (x - mean);
    const double var = ss / (R - 1);

    MomentEstimate m;
    m.mean = mean;
    m.variance = var;
    m.std_dev = std::sqrt(var);
    m.se_mean = std::sqrt(var / R);
    // Gaussian approximation for the sampling error of a variance estimate.
    m.se_variance = var * std::sqrt(2.0 / (R - 1));
    for (std::uint64_t u : used) m.events += u;
    m.burn_in = t_burn;
    m.seed = seed;
    return m;
}

} // namespace mmlab
