#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "mmlab/params.hpp"

namespace mmlab {

// Point in the (substrate, complex) concentration plane. The product
// concentration decouples (dp/dt = k2*c) and is reconstructed on demand.
struct State2 {
    double s = 0;
    double c = 0;
};

enum class VectorFieldKind {
    full_mass_action, // planar (s, c) system
    sqssa,            // ds/dt = k0 - v s/(K_M + s)
    linear_sqssa,     // ds/dt = k0 - v s/K_M
    qea,              // slow flow on the quasi-equilibrium manifold
    qea_special,      // its small-eps_ss, small-beta limit: ds/dt = k0 - v s/(K_S + s)
    reverse_closed,   // reverse-QSSA reduction of the closed reaction: (0, -k2 c)
    zero_enzyme,      // degenerate e_T -> 0 scenario with {c = 0} invariant
};

bool is_reduced_1d(VectorFieldKind kind);

// Time derivative (ds/dt, dc/dt). One-dimensional reductions report dc/dt = 0;
// their complex coordinate is slaved to s via slaved_complex.
Eigen::Vector2d eval_vf(VectorFieldKind kind, const State2& x, const Parameters& p);

// c-nullcline of the full system, c = e_T s/(K_M + s).
double qss_manifold(double s, const Parameters& p);

// Binding equilibrium, c = e_T s/(K_S + s).
double qea_manifold(double s, const Parameters& p);

// Companion manifold of a 1-D reduction: qss for sQSSA, its linearisation for
// linear_sqssa, the binding equilibrium for both QEA kinds.
double slaved_complex(VectorFieldKind kind, double s, const Parameters& p);

// Jacobian of the full mass-action field at x.
Eigen::Matrix2d jacobian(const State2& x, const Parameters& p);

struct Trajectory {
    VectorFieldKind kind;
    std::vector<double> times;
    std::vector<State2> states;
    std::vector<double> product; // filled only when requested
    long clamped = 0;            // negative-concentration clamps applied
};

struct IntegrateOptions {
    bool with_product = false;
};

// Fixed-step classic Runge-Kutta. Samples every accepted step, including the
// initial state; the final step is shortened to land exactly on t_end. For the
// full field the step must not exceed t_C/10 so the fast relaxation is
// resolved. Throws DivergenceError on non-finite states.
Trajectory integrate(VectorFieldKind kind, State2 initial, double t_end, double step,
                     const Parameters& p, const IntegrateOptions& opt = {});

// Columns t,s,c plus p when present, 17 significant digits.
void write_csv(const Trajectory& traj, std::ostream& os);

} // namespace mmlab
