#include "mmlab/vector_fields.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "mmlab/errors.hpp"

namespace mmlab {

bool is_reduced_1d(VectorFieldKind kind) {
    switch (kind) {
    case VectorFieldKind::sqssa:
    case VectorFieldKind::linear_sqssa:
    case VectorFieldKind::qea:
    case VectorFieldKind::qea_special:
        return true;
    default:
        return false;
    }
}

Eigen::Vector2d eval_vf(VectorFieldKind kind, const State2& x, const Parameters& p) {
    const double s = x.s;
    const double c = x.c;
    switch (kind) {
    case VectorFieldKind::full_mass_action:
        return {p.k0 - p.k1 * (p.e_T - c) * s + p.k_m1 * c,
                p.k1 * (p.e_T - c) * s - (p.k_m1 + p.k2) * c};
    case VectorFieldKind::sqssa: {
        const double K_M = (p.k_m1 + p.k2) / p.k1;
        return {p.k0 - p.k2 * p.e_T * s / (K_M + s), 0.0};
    }
    case VectorFieldKind::linear_sqssa: {
        const double K_M = (p.k_m1 + p.k2) / p.k1;
        return {p.k0 - p.k2 * p.e_T * s / K_M, 0.0};
    }
    case VectorFieldKind::qea: {
        // Slow flow obtained by eliminating c through the binding equilibrium;
        // the prefactor q = k_m1 + k1 s is kept explicit so the expression
        // stays exact at s = 0.
        const double q = p.k_m1 + p.k1 * s;
        return {q * (p.k0 * q - p.k2 * p.k1 * p.e_T * s) /
                    (p.k1 * p.k_m1 * p.e_T + q * q),
                0.0};
    }
    case VectorFieldKind::qea_special: {
        const double K_S = p.k_m1 / p.k1;
        return {p.k0 - p.k2 * p.e_T * s / (K_S + s), 0.0};
    }
    case VectorFieldKind::reverse_closed:
        return {0.0, -p.k2 * c};
    case VectorFieldKind::zero_enzyme:
        return {p.k0 + p.k1 * c * s + p.k_m1 * c,
                -p.k1 * c * s - (p.k_m1 + p.k2) * c};
    }
    return {0.0, 0.0};
}

double qss_manifold(double s, const Parameters& p) {
    const double K_M = (p.k_m1 + p.k2) / p.k1;
    return p.e_T * s / (K_M + s);
}

double qea_manifold(double s, const Parameters& p) {
    const double K_S = p.k_m1 / p.k1;
    return p.e_T * s / (K_S + s);
}

double slaved_complex(VectorFieldKind kind, double s, const Parameters& p) {
    switch (kind) {
    case VectorFieldKind::sqssa:
        return qss_manifold(s, p);
    case VectorFieldKind::linear_sqssa:
        return p.e_T * s * p.k1 / (p.k_m1 + p.k2);
    case VectorFieldKind::qea:
    case VectorFieldKind::qea_special:
        return qea_manifold(s, p);
    default:
        throw InvalidParameterError("slaved_complex requires a 1-D reduction kind");
    }
}

Eigen::Matrix2d jacobian(const State2& x, const Parameters& p) {
    Eigen::Matrix2d J;
    J << -p.k1 * (p.e_T - x.c), p.k1 * x.s + p.k_m1,
         p.k1 * (p.e_T - x.c), -p.k1 * x.s - p.k_m1 - p.k2;
    return J;
}

namespace {

using Vec3 = Eigen::Vector3d; // (s, c, p)

Vec3 rhs(VectorFieldKind kind, bool reduced, const Vec3& y, const Parameters& p) {
    State2 st{y[0], reduced ? slaved_complex(kind, y[0], p) : y[1]};
    const Eigen::Vector2d f = eval_vf(kind, st, p);
    return {f[0], reduced ? 0.0 : f[1], p.k2 * st.c};
}

Vec3 rk4_step(VectorFieldKind kind, bool reduced, const Vec3& y, double h,
              const Parameters& p) {
    const Vec3 k1 = rhs(kind, reduced, y, p);
    const Vec3 k2 = rhs(kind, reduced, y + 0.5 * h * k1, p);
    const Vec3 k3 = rhs(kind, reduced, y + 0.5 * h * k2, p);
    const Vec3 k4 = rhs(kind, reduced, y + h * k3, p);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace

Trajectory integrate(VectorFieldKind kind, State2 initial, double t_end, double step,
                     const Parameters& p, const IntegrateOptions& opt) {
    p.validate();
    if (!(step > 0))
        throw InvalidParameterError("step must be positive, got " + std::to_string(step));
    if (!(t_end >= 0))
        throw InvalidParameterError("t_end must be non-negative, got " +
                                    std::to_string(t_end));
    if (kind == VectorFieldKind::full_mass_action) {
        const double t_C = 1.0 / (p.k_m1 + p.k2);
        if (step > t_C / 10.0 * (1.0 + 1e-12))
            throw InvalidParameterError(
                "step " + std::to_string(step) + " does not resolve the fast timescale; "
                "the full field needs step <= t_C/10 = " + std::to_string(t_C / 10.0));
    }

    const bool reduced = is_reduced_1d(kind);
    Trajectory traj;
    traj.kind = kind;

    Vec3 y{initial.s, reduced ? slaved_complex(kind, initial.s, p) : initial.c, 0.0};

    const auto record = [&](double t) {
        traj.times.push_back(t);
        traj.states.push_back({y[0], y[1]});
        if (opt.with_product) traj.product.push_back(y[2]);
    };
    record(0.0);

    const long n_full = static_cast<long>(std::floor(t_end / step + 1e-9));
    const double rem = t_end - static_cast<double>(n_full) * step;

    const auto advance = [&](double h, double t_new) {
        y = rk4_step(kind, reduced, y, h, p);
        if (!y.allFinite())
            throw DivergenceError("state diverged near t = " + std::to_string(t_new));
        for (int i = 0; i < 3; ++i)
            if (y[i] < 0.0) {
                y[i] = 0.0;
                ++traj.clamped;
            }
        if (reduced) y[1] = slaved_complex(kind, y[0], p);
        record(t_new);
    };

    for (long i = 1; i <= n_full; ++i) advance(step, static_cast<double>(i) * step);
    if (rem > 1e-12 * t_end) advance(rem, t_end);

    return traj;
}

void write_csv(const Trajectory& traj, std::ostream& os) {
    const bool with_p = !traj.product.empty();
    os << (with_p ? "t,s,c,p\n" : "t,s,c\n");
    char buf[160];
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        if (with_p)
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", traj.times[i],
                          traj.states[i].s, traj.states[i].c, traj.product[i]);
        else
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", traj.times[i],
                          traj.states[i].s, traj.states[i].c);
        os << buf;
    }
}

} // namespace mmlab
