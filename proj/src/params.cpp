#include "mmlab/params.hpp"

#include <string>

#include "mmlab/errors.hpp"
#include "mmlab/lna.hpp"

namespace mmlab {

void Parameters::validate() const {
    auto positive = [](double value, const char* name) {
        if (!(value > 0))
            throw InvalidParameterError(std::string(name) + " must be positive, got " +
                                        std::to_string(value));
    };
    if (!(k0 >= 0))
        throw InvalidParameterError("k0 must be non-negative, got " + std::to_string(k0));
    positive(e_T, "eT");
    positive(k1, "k1");
    positive(k2, "k2");
    positive(k_m1, "km1");
    positive(omega, "omega");
}

void to_json(nlohmann::json& j, const Parameters& p) {
    j = nlohmann::json{{"k0", p.k0},   {"eT", p.e_T},    {"k1", p.k1},
                       {"k2", p.k2},   {"km1", p.k_m1},  {"omega", p.omega}};
}

void from_json(const nlohmann::json& j, Parameters& p) {
    j.at("k0").get_to(p.k0);
    j.at("eT").get_to(p.e_T);
    j.at("k1").get_to(p.k1);
    j.at("k2").get_to(p.k2);
    j.at("km1").get_to(p.k_m1);
    j.at("omega").get_to(p.omega);
}

DerivedConstants derive(const Parameters& p) {
    p.validate();
    DerivedConstants d;
    d.K_M = (p.k_m1 + p.k2) / p.k1;
    d.K_S = p.k_m1 / p.k1;
    d.v = p.k2 * p.e_T;
    d.alpha = p.k0 / d.v;
    d.beta = p.k2 / p.k_m1;
    d.lambda = p.k0 / (p.k_m1 * p.e_T);
    d.eps_ss = p.e_T / d.K_M;
    d.t_C = 1.0 / (p.k_m1 + p.k2);
    d.t_S = 1.0 / (p.k1 * p.e_T);
    if (d.alpha < 1.0) {
        const double gamma = d.alpha * d.K_M / (1.0 - d.alpha);
        const double nu = d.alpha * p.e_T;
        d.eps = (p.e_T - nu) / (d.K_M + gamma);
    }
    return d;
}

FixedPoint fixed_point(const Parameters& p) {
    const DerivedConstants d = derive(p);
    if (!(d.alpha < 1.0))
        throw NoStationaryPointError(
            "no stationary point: alpha = k0/(k2*eT) = " + std::to_string(d.alpha) +
            " >= 1, substrate accumulates without bound");
    return {d.alpha * d.K_M / (1.0 - d.alpha), d.alpha * p.e_T};
}

RegimeReport classify_regime(const Parameters& p, const RegimeThresholds& thr) {
    const DerivedConstants d = derive(p);
    RegimeReport r;
    r.eps_ss = d.eps_ss;
    r.alpha = d.alpha;
    r.beta = d.beta;
    r.lambda = d.lambda;
    r.discrepancy = discrepancy(d.alpha, d.beta);
    if (d.eps_ss > thr.eps_ss) {
        r.classification = Regime::no_reduction;
        r.nearest_tfpv = Tfpv::none;
    } else if (d.alpha <= thr.alpha) {
        r.classification = Regime::singular_perturbation_sqssa;
        r.nearest_tfpv = Tfpv::pi1_sqssa;
    } else if (d.beta <= thr.beta) {
        r.classification = Regime::singular_perturbation_qea;
        r.nearest_tfpv = Tfpv::pi3_qea;
    } else {
        r.classification = Regime::near_invariance_only;
        r.nearest_tfpv = Tfpv::none;
    }
    return r;
}

const char* to_string(Tfpv t) {
    switch (t) {
    case Tfpv::pi1_sqssa: return "pi1_sqssa";
    case Tfpv::pi3_qea: return "pi3_qea";
    case Tfpv::none: return "none";
    }
    return "none";
}

const char* to_string(Regime r) {
    switch (r) {
    case Regime::singular_perturbation_sqssa: return "singular_perturbation_sqssa";
    case Regime::singular_perturbation_qea: return "singular_perturbation_qea";
    case Regime::near_invariance_only: return "near_invariance_only";
    case Regime::no_reduction: return "no_reduction";
    }
    return "no_reduction";
}

} // namespace mmlab
