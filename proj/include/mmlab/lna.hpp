#pragma once

#include <Eigen/Core>

#include "mmlab/params.hpp"

namespace mmlab {

// Stationary substrate fluctuations around the fixed point, from the linear
// noise approximation. All sigma2_* values are variances of the substrate
// copy number n_S (count units); divide by omega^2 for concentration units,
// or use the *_concentration accessors.

// Closed form for the full network,
//   omega*gamma * (1 + (gamma/K_M) * ((K_S+gamma)/(K_M+gamma)) * 1/(1+eps)).
double sigma2_full(const Parameters& p);

// Same expression in the eps -> 0 limit; the comparison against the reduced
// network is usually quoted in this limit.
double sigma2_full_eps_zero(const Parameters& p);

// Closed form for the one-variable reduced network, omega*gamma*(1 + gamma/K_M).
double sigma2_red(const Parameters& p);

double sigma2_full_concentration(const Parameters& p);
double sigma2_red_concentration(const Parameters& p);

// Independent route: stationary covariance of (n_S, n_C) for the full network
// from the Lyapunov equation J Sigma + Sigma J^T + D = 0, with J the fixed
// point Jacobian and D the diffusion matrix assembled from the four reaction
// propensities. Symmetric by construction (only the three distinct entries
// are solved for). Throws SingularSystemError when J is not Hurwitz.
Eigen::Matrix2d stationary_covariance(const Parameters& p);

// (0,0) entry of stationary_covariance; cross-checks sigma2_full.
double lyapunov_cross_check(const Parameters& p);

// Predicted relative gap between reduced and full substrate variance in the
// eps -> 0 limit,
//   (1-alpha)*alpha*beta / (1 + beta*(1 - alpha*(1-alpha))).
// Tends to 0 for beta -> 0 and to alpha(1-alpha)/(1 - alpha(1-alpha)) for
// beta -> infinity; supremum 1/3 at alpha = 1/2. Meaningful for alpha < 1.
double discrepancy(double alpha, double beta);
double discrepancy(const Parameters& p);

struct LnaResult {
    double sigma2_full = 0;
    double sigma2_red = 0;
    double sigma2_lyapunov = 0;
    double discrepancy = 0;
};

LnaResult evaluate_lna(const Parameters& p);

// Keys exactly {sigma2_full, sigma2_red, sigma2_lyapunov, discrepancy}.
void to_json(nlohmann::json& j, const LnaResult& r);

} // namespace mmlab
