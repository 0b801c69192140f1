#pragma once

#include <iosfwd>
#include <vector>

#include "mmlab/lna.hpp"
#include "mmlab/ssa.hpp"

namespace mmlab {

// One-parameter family along beta = k2/k_m1 holding K_M, e_T, k1, alpha and
// omega fixed: k_m1 = K_M k1/(1+beta), k2 = K_M k1 beta/(1+beta), k0 = alpha v.
// With the defaults the fixed point sits at gamma = K_M regardless of beta,
// so the full and reduced networks stay comparable across the sweep.
Parameters beta_family(double beta, double alpha = 0.5, double K_M = 1000.0,
                       double e_T = 10.0, double k1 = 1.0, double omega = 1.0);

struct SweepPoint {
    double beta = 0;
    Parameters params;
    MomentEstimate full;
    MomentEstimate reduced;
    LnaResult lna;
    std::uint64_t seed = 0; // per-point seed both estimates derive from
};

struct SweepOptions {
    std::vector<double> betas{0.01, 0.1, 1.0, 10.0, 100.0};
    double alpha = 0.5;
    std::uint64_t budget = 10'000'000;
    std::uint64_t seed = 1;
    int replicas = 0;    // > 0 selects the ensemble estimator instead
    unsigned workers = 0; // 0 = hardware concurrency
    MomentOptions moments;
};

// Point i is seeded with hash64(seed, i); its full and reduced runs use
// substreams 0 and 1 of that. Identical options give identical results for
// any worker count.
std::vector<SweepPoint> run_beta_sweep(const SweepOptions& opt);

// Header exactly
//   beta,mu_full,se_mu_full,sigma_full_ssa,sigma_red_ssa,sigma_full_lna,sigma_red_lna,discrepancy_eq14,seed
// with the sigma columns holding standard deviations in count units.
void write_csv(const std::vector<SweepPoint>& points, std::ostream& os);

} // namespace mmlab
