#pragma once

#include <Eigen/Core>

#include "mmlab/params.hpp"
#include "mmlab/vector_fields.hpp"

namespace mmlab {

// Singular perturbation reductions via the coordinate-free slow-manifold
// projection. Near a Tikhonov-Fenichel parameter value the field splits as
//
//   full(z) = w(z) + G(z),   w = P(z) f(z),
//
// where w is the field at the TFPV itself, f cuts out its critical manifold
// M = {f = 0}, P spans the fast directions, and G carries the perturbation.
// On M the reduced slow flow is z' = Pi(z) G(z) with the oblique projector
//
//   Pi = I - P (Df P)^{-1} Df,
//
// defined wherever Df P is invertible (hyperbolicity of the fast direction).

enum class TfpvTag {
    pi1,            // k0, e_T -> 0: M = {c = 0}, reduction is the sQSSA
    pi3,            // k0, k2 -> 0: M = binding equilibrium, reduction is the QEA
    reverse_closed, // k_m1, k2 -> 0 in the closed reaction: M = {s = 0}, reverse QSSA
};

struct Factorization {
    TfpvTag tfpv;
    Parameters params;
    double delta; // reverse_closed only: manifold is {s = 0, 0 <= c <= e_T - delta}

    Eigen::Vector2d P(const State2& z) const;
    double f(const State2& z) const;
    Eigen::RowVector2d Df(const State2& z) const;

    // Perturbation G = full - P*f, evaluated with the actual (starred) rate
    // constants. For reverse_closed "full" is the closed reaction, k0 = 0.
    Eigen::Vector2d G(const State2& z) const;

    // Field at the TFPV itself; w + G reconstructs the governing field.
    Eigen::Vector2d w(const State2& z) const;

    // |f(z)| within manifold_tolerance, plus the compactness bound on c for
    // reverse_closed.
    bool on_manifold(const State2& z) const;
    double manifold_tolerance() const; // 1e-9 * (k_m1 + k2) * e_T

    // Point of M at substrate coordinate s (pi1, pi3) or complex coordinate c
    // (reverse_closed).
    State2 manifold_point(double coord) const;
};

// delta defaults to 0.05*e_T and only affects reverse_closed, whose stored
// parameters also get k0 forced to 0: that scenario lives in the closed
// reaction.
Factorization factorization_for(TfpvTag tag, const Parameters& p, double delta = -1.0);

struct ProjectionData {
    State2 point;
    Eigen::Matrix2d pi;
    // Df P collapses to a scalar here (one fast direction); it is also the
    // nontrivial eigenvalue governing attraction of M.
    double dfp = 0;
    bool attracting = false;
};

// Throws ManifoldDomainError off the manifold and HyperbolicityError where
// Df P vanishes.
ProjectionData projector_at(const Factorization& F, const State2& z);

// Pi(z) G(z), the reduced slow flow at z in M.
Eigen::Vector2d reduced_field(const Factorization& F, const State2& z);

const char* to_string(TfpvTag t);

} // namespace mmlab
