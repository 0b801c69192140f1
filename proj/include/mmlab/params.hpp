#pragma once

#include <optional>

#include "json.hpp"

namespace mmlab {

// Rate constants of the open Michaelis-Menten mechanism
//
//   0 -> S          (k0, zeroth order influx)
//   S + E <-> C     (k1 forward, km1 back)
//   C -> E + P      (k2)
//
// together with the system volume omega used by the stochastic layer.
// Everything in this library works in concentration units; counts appear only
// inside the reaction-network code, which multiplies by omega at the boundary.
struct Parameters {
    double k0 = 0;    // substrate influx, concentration/time; 0 closes the reaction
    double e_T = 0;   // total enzyme concentration, conserved
    double k1 = 0;    // binding, 1/(concentration*time)
    double k2 = 0;    // catalysis, 1/time
    double k_m1 = 0;  // dissociation, 1/time
    double omega = 1; // volume, counts per unit concentration

    // k1, k2, k_m1, e_T, omega strictly positive; k0 >= 0. Throws
    // InvalidParameterError naming the offending field.
    void validate() const;
};

// JSON object with keys exactly {k0, eT, k1, k2, km1, omega}.
void to_json(nlohmann::json& j, const Parameters& p);
void from_json(const nlohmann::json& j, Parameters& p);

// Dimensionless qualifiers and characteristic scales. eps is the stationary
// perturbation parameter (e_T - nu)/(K_M + gamma) and is absent when no
// stationary point exists (alpha >= 1).
struct DerivedConstants {
    double K_M = 0;    // Michaelis constant (k_m1 + k2)/k1
    double K_S = 0;    // dissociation constant k_m1/k1
    double v = 0;      // limiting rate k2*e_T
    double alpha = 0;  // k0/v, load on the catalytic capacity
    double beta = 0;   // k2/k_m1
    double lambda = 0; // k0/(k_m1*e_T), equals alpha*beta
    double eps_ss = 0; // e_T/K_M, ratio of fast to slow timescale
    double t_C = 0;    // 1/(k_m1 + k2)
    double t_S = 0;    // 1/(k1*e_T)
    std::optional<double> eps;
};

DerivedConstants derive(const Parameters& p);

// Unique positive stationary point of the full mass-action system, which
// exists iff alpha < 1. gamma is the substrate, nu the complex coordinate.
struct FixedPoint {
    double gamma = 0;
    double nu = 0;
};

FixedPoint fixed_point(const Parameters& p);

// Tikhonov-Fenichel parameter value whose singular perturbation reduction is
// the closest match for a parameter set, if any.
enum class Tfpv { pi1_sqssa, pi3_qea, none };

enum class Regime {
    singular_perturbation_sqssa, // eps_ss and alpha small
    singular_perturbation_qea,   // eps_ss and beta small, alpha not
    near_invariance_only,        // eps_ss small but no TFPV scenario applies
    no_reduction,
};

struct RegimeThresholds {
    double eps_ss = 0.1;
    double alpha = 0.1;
    double beta = 0.1;
};

struct RegimeReport {
    double eps_ss = 0;
    double alpha = 0;
    double beta = 0;
    double lambda = 0;
    double discrepancy = 0; // predicted relative variance gap, meaningful for alpha < 1
    Tfpv nearest_tfpv = Tfpv::none;
    Regime classification = Regime::no_reduction;
};

// Threshold logic, checked in order: eps_ss above threshold means no
// reduction at all; otherwise small alpha selects the sQSSA scenario (taking
// precedence when beta is small too, since the sQSSA manifold is the more
// robust of the two), then small beta selects the QEA scenario, and anything
// else is near-invariance without a supporting TFPV.
RegimeReport classify_regime(const Parameters& p, const RegimeThresholds& thr = {});

const char* to_string(Tfpv t);
const char* to_string(Regime r);

} // namespace mmlab
