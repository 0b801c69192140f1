#include "mmlab/slow_manifold.hpp"

#include <cmath>
#include <string>

#include "mmlab/errors.hpp"

namespace mmlab {

Eigen::Vector2d Factorization::P(const State2& z) const {
    const Parameters& p = params;
    switch (tfpv) {
    case TfpvTag::pi1:
        return {p.k1 * z.s + p.k_m1, -(p.k1 * z.s + p.k_m1 + p.k2)};
    case TfpvTag::pi3:
        return {1.0, -1.0};
    case TfpvTag::reverse_closed:
        return {-p.k1 * (p.e_T - z.c), p.k1 * (p.e_T - z.c)};
    }
    return {0, 0};
}

double Factorization::f(const State2& z) const {
    const Parameters& p = params;
    switch (tfpv) {
    case TfpvTag::pi1:
        return z.c;
    case TfpvTag::pi3:
        return p.k_m1 * z.c - p.k1 * (p.e_T - z.c) * z.s;
    case TfpvTag::reverse_closed:
        return z.s;
    }
    return 0;
}

Eigen::RowVector2d Factorization::Df(const State2& z) const {
    const Parameters& p = params;
    switch (tfpv) {
    case TfpvTag::pi1:
        return {0.0, 1.0};
    case TfpvTag::pi3:
        return {-p.k1 * (p.e_T - z.c), p.k_m1 + p.k1 * z.s};
    case TfpvTag::reverse_closed:
        return {1.0, 0.0};
    }
    return {0, 0};
}

Eigen::Vector2d Factorization::G(const State2& z) const {
    const Parameters& p = params;
    switch (tfpv) {
    case TfpvTag::pi1:
        return {p.k0 - p.k1 * p.e_T * z.s, p.k1 * p.e_T * z.s};
    case TfpvTag::pi3:
        return {p.k0, -p.k2 * z.c};
    case TfpvTag::reverse_closed:
        return {p.k_m1 * z.c, -(p.k_m1 + p.k2) * z.c};
    }
    return {0, 0};
}

Eigen::Vector2d Factorization::w(const State2& z) const {
    return P(z) * f(z);
}

double Factorization::manifold_tolerance() const {
    return 1e-9 * (params.k_m1 + params.k2) * params.e_T;
}

bool Factorization::on_manifold(const State2& z) const {
    if (std::abs(f(z)) > manifold_tolerance()) return false;
    if (tfpv == TfpvTag::reverse_closed) {
        const double slack = 1e-12 * params.e_T;
        if (z.c < -slack || z.c > params.e_T - delta + slack) return false;
    }
    return true;
}

State2 Factorization::manifold_point(double coord) const {
    switch (tfpv) {
    case TfpvTag::pi1:
        return {coord, 0.0};
    case TfpvTag::pi3:
        return {coord, qea_manifold(coord, params)};
    case TfpvTag::reverse_closed:
        return {0.0, coord};
    }
    return {0, 0};
}

Factorization factorization_for(TfpvTag tag, const Parameters& p, double delta) {
    p.validate();
    Factorization F;
    F.tfpv = tag;
    F.params = p;
    if (tag == TfpvTag::reverse_closed) F.params.k0 = 0.0;
    F.delta = delta < 0 ? 0.05 * p.e_T : delta;
    if (F.delta >= p.e_T)
        throw InvalidParameterError("delta must be below eT, got " + std::to_string(delta));
    return F;
}

ProjectionData projector_at(const Factorization& F, const State2& z) {
    if (!F.on_manifold(z))
        throw ManifoldDomainError("point (s=" + std::to_string(z.s) +
                                  ", c=" + std::to_string(z.c) +
                                  ") is not on the critical manifold of " +
                                  to_string(F.tfpv));
    const Eigen::Vector2d P = F.P(z);
    const Eigen::RowVector2d Df = F.Df(z);
    const double dfp = Df * P;

    // Rate scale of the fast eigenvalue; all three scenarios have |Df P|
    // of this order wherever they are hyperbolic.
    const double scale =
        F.params.k_m1 + F.params.k2 + F.params.k1 * (std::abs(z.s) + F.params.e_T);
    if (std::abs(dfp) <= 1e-12 * scale)
        throw HyperbolicityError("Df*P = " + std::to_string(dfp) +
                                 " vanishes at (s=" + std::to_string(z.s) +
                                 ", c=" + std::to_string(z.c) +
                                 "): manifold not normally hyperbolic there");

    ProjectionData out;
    out.point = z;
    out.pi = Eigen::Matrix2d::Identity() - P * (1.0 / dfp) * Df;
    out.dfp = dfp;
    out.attracting = dfp < 0;
    return out;
}

Eigen::Vector2d reduced_field(const Factorization& F, const State2& z) {
    return projector_at(F, z).pi * F.G(z);
}

const char* to_string(TfpvTag t) {
    switch (t) {
    case TfpvTag::pi1: return "pi1";
    case TfpvTag::pi3: return "pi3";
    case TfpvTag::reverse_closed: return "reverse_closed";
    }
    return "";
}

} // namespace mmlab
