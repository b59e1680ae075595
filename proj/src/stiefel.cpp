#include "cayley/stiefel.hpp"

#include <cmath>
#include <sstream>

#include "cayley/quantum.hpp"

namespace cayley {

namespace {

void require_same_square(const CMatrix &a, const CMatrix &b, const char *op) {
    if (!a.is_square() || !b.is_square() || a.rows() != b.rows()) {
        throw Error(ErrorCategory::dimension, std::string(op) + ": operands must be square with equal dimensions");
    }
}

// I + s·a
CMatrix shifted_identity(const CMatrix &a, double s) {
    CMatrix m = s * a;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        m(i, i) += 1.0;
    }
    return m;
}

}  // namespace

double tangent_residual(const CMatrix &z, const CMatrix &w) {
    require_same_square(z, w, "tangent_residual");
    const CMatrix wz = matmul(dagger(w), z);
    return std::sqrt(frobenius_norm_sq(wz + dagger(wz)));
}

double TangentVector::residual() const { return tangent_residual(z, base); }

CMatrix skew_from_gradient(const CMatrix &g, const CMatrix &w) {
    require_same_square(g, w, "skew_from_gradient");
    const CMatrix gw = matmul(g, dagger(w));
    CMatrix a = gw - dagger(gw);  // w g† = (g w†)†
    CMatrix skew = a - dagger(a);
    skew *= 0.5;
    return skew;
}

CMatrix cayley_step(const CMatrix &w, const CMatrix &a, double lambda) {
    require_same_square(w, a, "cayley_step");
    if (!std::isfinite(lambda)) {
        throw Error(ErrorCategory::invalid_argument, "cayley_step: step size must be finite");
    }
    const double a_norm = std::sqrt(frobenius_norm_sq(a));
    const double skew_defect = std::sqrt(frobenius_norm_sq(a + dagger(a)));
    if (skew_defect > 1e-8 * a_norm) {
        std::ostringstream msg;
        msg << "cayley_step: generator is not skew-Hermitian (||A + A^H||_F = " << skew_defect << ")";
        throw Error(ErrorCategory::invalid_argument, msg.str());
    }
    const double w_defect = std::sqrt(unitary_error(w));
    if (w_defect > 1e-8) {
        std::ostringstream msg;
        msg << "cayley_step: base point is not unitary (||W W^H - I||_F = " << w_defect << ")";
        throw Error(ErrorCategory::invalid_argument, msg.str());
    }
    const double half = 0.5 * lambda;
    const CMatrix rhs = matmul(shifted_identity(a, -half), w);
    return solve_linear(shifted_identity(a, half), rhs);
}

cplx canonical_inner(const CMatrix &z1, const CMatrix &z2, const CMatrix &w) {
    require_same_square(z1, w, "canonical_inner");
    require_same_square(z2, w, "canonical_inner");
    // tr(z1† (I - w w†/2) z2) = tr(z1† z2) - tr((w† z1)† (w† z2)) / 2
    const CMatrix wd = dagger(w);
    return trace_adjoint_product(z1, z2) - 0.5 * trace_adjoint_product(matmul(wd, z1), matmul(wd, z2));
}

CMatrix riemannian_grad(const CMatrix &g, const CMatrix &w) { return matmul(skew_from_gradient(g, w), w); }

double descent_derivative(const CMatrix &g, const CMatrix &w) {
    const CMatrix z = riemannian_grad(g, w);
    return -canonical_inner(z, z, w).real();
}

StepResult backtracking_step(const CMatrix &w, const CMatrix &g, const LossFn &loss_fn, double lambda0,
                             const BacktrackingOptions &options) {
    if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) {
        throw Error(ErrorCategory::invalid_argument, "backtracking_step: lambda0 must be positive and finite");
    }
    const double f0 = options.loss_at_w ? *options.loss_at_w : loss_fn(w);
    const CMatrix a = skew_from_gradient(g, w);
    const CMatrix z = matmul(a, w);
    const double grad_norm_sq = canonical_inner(z, z, w).real();

    StepResult result;
    result.loss_before = f0;
    if (grad_norm_sq == 0.0) {
        result.w_next = w;
        result.lambda_used = lambda0;
        result.loss_after = f0;
        return result;
    }

    double lambda = lambda0;
    for (int halvings = 0; halvings <= options.max_halvings; ++halvings) {
        CMatrix y = cayley_step(w, a, lambda);
        const double f = loss_fn(y);
        if (f <= f0 - options.armijo_factor * 0.5 * lambda * grad_norm_sq) {
            result.w_next = std::move(y);
            result.lambda_used = lambda;
            result.loss_after = f;
            result.n_backtracks = halvings;
            return result;
        }
        lambda *= 0.5;
    }
    std::ostringstream msg;
    msg << "backtracking_step: no sufficient decrease after " << options.max_halvings
        << " halvings (loss " << f0 << ", ||AW||_c^2 " << grad_norm_sq
        << "); check that the gradient matches the loss";
    throw Error(ErrorCategory::line_search, msg.str());
}

StepResult fixed_step(const CMatrix &w, const CMatrix &g, const LossFn &loss_fn, double lambda,
                      std::optional<double> loss_at_w) {
    StepResult result;
    result.loss_before = loss_at_w ? *loss_at_w : loss_fn(w);
    result.w_next = cayley_step(w, skew_from_gradient(g, w), lambda);
    result.lambda_used = lambda;
    result.loss_after = loss_fn(result.w_next);
    return result;
}

}  // namespace cayley
