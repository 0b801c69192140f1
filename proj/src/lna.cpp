#include "mmlab/lna.hpp"

#include <Eigen/Dense>

#include "mmlab/errors.hpp"
#include "mmlab/vector_fields.hpp"

namespace mmlab {

namespace {

double bracket(double gamma, double K_M, double K_S, double eps) {
    return 1.0 + (gamma / K_M) * ((K_S + gamma) / (K_M + gamma)) / (1.0 + eps);
}

} // namespace

double sigma2_full(const Parameters& p) {
    const DerivedConstants d = derive(p);
    const FixedPoint fp = fixed_point(p);
    return p.omega * fp.gamma * bracket(fp.gamma, d.K_M, d.K_S, *d.eps);
}

double sigma2_full_eps_zero(const Parameters& p) {
    const DerivedConstants d = derive(p);
    const FixedPoint fp = fixed_point(p);
    return p.omega * fp.gamma * bracket(fp.gamma, d.K_M, d.K_S, 0.0);
}

double sigma2_red(const Parameters& p) {
    const DerivedConstants d = derive(p);
    const FixedPoint fp = fixed_point(p);
    return p.omega * fp.gamma * (1.0 + fp.gamma / d.K_M);
}

double sigma2_full_concentration(const Parameters& p) {
    return sigma2_full(p) / (p.omega * p.omega);
}

double sigma2_red_concentration(const Parameters& p) {
    return sigma2_red(p) / (p.omega * p.omega);
}

Eigen::Matrix2d stationary_covariance(const Parameters& p) {
    const FixedPoint fp = fixed_point(p);
    const Eigen::Matrix2d J = jacobian({fp.gamma, fp.nu}, p);

    // Diffusion matrix sum_r a_r nu_r nu_r^T at the fixed point, count units.
    // Stoichiometries: influx (+1,0), binding (-1,+1), unbinding (+1,-1),
    // catalysis (0,-1).
    const double a_in = p.omega * p.k0;
    const double a_bind = p.omega * p.k1 * fp.gamma * (p.e_T - fp.nu);
    const double a_unbind = p.omega * p.k_m1 * fp.nu;
    const double a_cat = p.omega * p.k2 * fp.nu;
    Eigen::Matrix2d D;
    D << a_in + a_bind + a_unbind, -(a_bind + a_unbind),
         -(a_bind + a_unbind), a_bind + a_unbind + a_cat;

    // J Sigma + Sigma J^T + D = 0 written out for the three distinct entries
    // x = (Sigma_11, Sigma_12, Sigma_22).
    Eigen::Matrix3d A;
    A << 2 * J(0, 0), 2 * J(0, 1), 0,
         J(1, 0), J(0, 0) + J(1, 1), J(0, 1),
         0, 2 * J(1, 0), 2 * J(1, 1);
    const Eigen::Vector3d b{-D(0, 0), -D(0, 1), -D(1, 1)};

    const Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
    if (!lu.isInvertible())
        throw SingularSystemError("stationary covariance undefined: Jacobian at the "
                                  "fixed point is not Hurwitz");
    const Eigen::Vector3d x = lu.solve(b);

    Eigen::Matrix2d Sigma;
    Sigma << x[0], x[1], x[1], x[2];
    return Sigma;
}

double lyapunov_cross_check(const Parameters& p) {
    return stationary_covariance(p)(0, 0);
}

double discrepancy(double alpha, double beta) {
    return (1.0 - alpha) * alpha * beta / (1.0 + beta * (1.0 - alpha * (1.0 - alpha)));
}

double discrepancy(const Parameters& p) {
    const DerivedConstants d = derive(p);
    return discrepancy(d.alpha, d.beta);
}

LnaResult evaluate_lna(const Parameters& p) {
    LnaResult r;
    r.sigma2_full = sigma2_full(p);
    r.sigma2_red = sigma2_red(p);
    r.sigma2_lyapunov = lyapunov_cross_check(p);
    r.discrepancy = discrepancy(p);
    return r;
}

void to_json(nlohmann::json& j, const LnaResult& r) {
    j = nlohmann::json{{"sigma2_full", r.sigma2_full},
                       {"sigma2_red", r.sigma2_red},
                       {"sigma2_lyapunov", r.sigma2_lyapunov},
                       {"discrepancy", r.discrepancy}};
}

} // namespace mmlab
