#pragma once

// Optimization machinery on the unitary group V_N(C^N) = {W : W†W = I}.
//
// With a Euclidean gradient G (convention: Df(W)[Z] = Re tr(G†Z)), the search
// direction is generated by the skew-Hermitian A = G W† - W G†, and the Cayley
// curve Y(λ) = (I + λ/2 A)^{-1} (I - λ/2 A) W stays on the manifold for every
// real λ with Y'(0) = -A W. Along that curve
//     d/dλ f(Y(λ)) at 0 = -<AW, AW>_c,
// where <Z1, Z2>_c = tr(Z1† (I - W W†/2) Z2) is the canonical metric.

#include <cstddef>
#include <functional>
#include <optional>

#include "cayley/linalg.hpp"

namespace cayley {

/// A direction Z at base point W; tangent when W†Z + Z†W = 0.
struct TangentVector {
    CMatrix z;
    CMatrix base;

    /// ||base† z + z† base||_F
    double residual() const;
    bool is_tangent(double tol = 1e-8) const { return residual() <= tol; }
};

double tangent_residual(const CMatrix &z, const CMatrix &w);

/// A = g w† - w g†, re-skewed as (A - A†)/2 to remove rounding drift.
CMatrix skew_from_gradient(const CMatrix &g, const CMatrix &w);

/// Cayley retraction Y(λ) = (I + λ/2 a)^{-1} (I - λ/2 a) w, computed with an LU
/// solve. Rejects a non-skew-Hermitian `a` or a non-unitary `w`.
CMatrix cayley_step(const CMatrix &w, const CMatrix &a, double lambda);

cplx canonical_inner(const CMatrix &z1, const CMatrix &z2, const CMatrix &w);

/// A·w with A from skew_from_gradient.
CMatrix riemannian_grad(const CMatrix &g, const CMatrix &w);

/// -<AW, AW>_c; never positive.
double descent_derivative(const CMatrix &g, const CMatrix &w);

struct StepResult {
    CMatrix w_next;
    double lambda_used = 0.0;
    double loss_before = 0.0;
    double loss_after = 0.0;
    int n_backtracks = 0;
};

using LossFn = std::function<double(const CMatrix &)>;

struct BacktrackingOptions {
    double armijo_factor = 0.5;
    int max_halvings = 40;
    /// f(w) when the caller already has it.
    std::optional<double> loss_at_w;
};

/// Halves λ from lambda0 until f(Y(λ)) <= f(W) - armijo_factor·(λ/2)·||AW||_c².
/// Returns w unchanged when ||AW||_c = 0. Throws Error(line_search) once
/// max_halvings is exhausted, which means the gradient disagrees with the loss.
StepResult backtracking_step(const CMatrix &w, const CMatrix &g, const LossFn &loss_fn, double lambda0,
                             const BacktrackingOptions &options = {});

/// One Cayley update with a fixed λ and no acceptance test.
StepResult fixed_step(const CMatrix &w, const CMatrix &g, const LossFn &loss_fn, double lambda,
                      std::optional<double> loss_at_w = std::nullopt);

}  // namespace cayley
