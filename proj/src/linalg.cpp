#include "cayley/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "cayley/kernels.hpp"
#include "cayley/random.hpp"

namespace cayley {

namespace {

std::string dims(const CMatrix &m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

[[noreturn]] void dimension_error(const std::string &what) { throw Error(ErrorCategory::dimension, what); }

}  // namespace

std::string_view category_name(ErrorCategory category) noexcept {
    switch (category) {
        case ErrorCategory::dimension:
            return "dimension";
        case ErrorCategory::singular:
            return "singular";
        case ErrorCategory::rank_deficient:
            return "rank_deficient";
        case ErrorCategory::line_search:
            return "line_search";
        case ErrorCategory::config:
            return "config";
        case ErrorCategory::io:
            return "io";
        case ErrorCategory::invalid_argument:
            return "invalid_argument";
    }
    return "unknown";
}

CMatrix::CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        dimension_error("matrix data has " + std::to_string(data_.size()) + " entries, expected " +
                        std::to_string(rows_ * cols_));
    }
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto &r : rows) {
        if (r.size() != cols_) {
            dimension_error("ragged matrix literal");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

bool CMatrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx &z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

CMatrix &CMatrix::operator+=(const CMatrix &other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        dimension_error("add: " + dims(*this) + " vs " + dims(other));
    }
    kernels::active().axpy(1.0, other.data_.data(), data_.data(), data_.size());
    return *this;
}

CMatrix &CMatrix::operator-=(const CMatrix &other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        dimension_error("subtract: " + dims(*this) + " vs " + dims(other));
    }
    kernels::active().axpy(-1.0, other.data_.data(), data_.data(), data_.size());
    return *this;
}

CMatrix &CMatrix::operator*=(cplx s) noexcept {
    for (auto &z : data_) {
        z *= s;
    }
    return *this;
}

CMatrix operator+(CMatrix a, const CMatrix &b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix &b) { return a -= b; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

CVector CVector::basis(std::size_t dim, std::size_t index) {
    CVector v(dim);
    v[index] = 1.0;
    return v;
}

CMatrix matmul(const CMatrix &a, const CMatrix &b) {
    if (a.cols() != b.rows()) {
        dimension_error("matmul: " + dims(a) + " * " + dims(b));
    }
    const auto &k = kernels::active();
    CMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cplx *out = c.row(i).data();
        for (std::size_t p = 0; p < a.cols(); ++p) {
            const cplx s = a(i, p);
            if (s != cplx(0.0)) {
                k.axpy(s, b.row(p).data(), out, b.cols());
            }
        }
    }
    return c;
}

CVector matvec(const CMatrix &a, const CVector &x) {
    if (a.cols() != x.dim()) {
        dimension_error("matvec: " + dims(a) + " * vector of dim " + std::to_string(x.dim()));
    }
    const auto &k = kernels::active();
    CVector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        y[i] = k.dotu(a.row(i).data(), x.data().data(), x.dim());
    }
    return y;
}

CMatrix dagger(const CMatrix &a) {
    CMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            t(j, i) = std::conj(a(i, j));
        }
    }
    return t;
}

CMatrix solve_linear(const CMatrix &a, const CMatrix &b) {
    if (!a.is_square()) {
        dimension_error("solve_linear: coefficient matrix " + dims(a) + " is not square");
    }
    if (a.rows() != b.rows()) {
        dimension_error("solve_linear: " + dims(a) + " vs right-hand side " + dims(b));
    }
    const std::size_t n = a.rows();
    const auto &k = kernels::active();
    CMatrix lu = a;
    CMatrix x = b;

    double scale = 0.0;
    for (const cplx &z : a.data()) {
        scale = std::max(scale, std::abs(z));
    }
    const double tiny = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;

    // Forward elimination; row swaps are applied to x immediately, so only the
    // upper factor is kept.
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot_row = col;
        double pivot_abs = std::abs(lu(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            double v = std::abs(lu(r, col));
            if (v > pivot_abs) {
                pivot_abs = v;
                pivot_row = r;
            }
        }
        if (!(pivot_abs > tiny)) {
            std::ostringstream msg;
            msg << "solve_linear: matrix is singular to working precision (pivot " << pivot_abs
                << " at column " << col << ")";
            throw SingularMatrixError(msg.str(), pivot_abs);
        }
        if (pivot_row != col) {
            std::swap_ranges(lu.row(col).begin(), lu.row(col).end(), lu.row(pivot_row).begin());
            std::swap_ranges(x.row(col).begin(), x.row(col).end(), x.row(pivot_row).begin());
        }
        const cplx inv_pivot = 1.0 / lu(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const cplx factor = lu(r, col) * inv_pivot;
            if (factor == cplx(0.0)) {
                continue;
            }
            lu(r, col) = 0.0;
            k.axpy(-factor, lu.row(col).data() + col + 1, lu.row(r).data() + col + 1, n - col - 1);
            k.axpy(-factor, x.row(col).data(), x.row(r).data(), x.cols());
        }
    }

    // Back substitution, one row of X at a time.
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx u = lu(i, j);
            if (u != cplx(0.0)) {
                k.axpy(-u, x.row(j).data(), x.row(i).data(), x.cols());
            }
        }
        const cplx inv = 1.0 / lu(i, i);
        for (cplx &z : x.row(i)) {
            z *= inv;
        }
    }
    return x;
}

double frobenius_norm_sq(const CMatrix &a) { return kernels::active().norm_sq(a.data().data(), a.size()); }

cplx trace(const CMatrix &a) {
    if (!a.is_square()) {
        dimension_error("trace: matrix " + dims(a) + " is not square");
    }
    cplx t = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        t += a(i, i);
    }
    return t;
}

cplx trace_adjoint_product(const CMatrix &a, const CMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        dimension_error("trace_adjoint_product: " + dims(a) + " vs " + dims(b));
    }
    // tr(a† b) = sum_ij conj(a_ij) b_ij
    return kernels::active().dotc(a.data().data(), b.data().data(), a.size());
}

CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx s = a(i, j);
            for (std::size_t p = 0; p < b.rows(); ++p) {
                for (std::size_t q = 0; q < b.cols(); ++q) {
                    out(i * b.rows() + p, j * b.cols() + q) = s * b(p, q);
                }
            }
        }
    }
    return out;
}

double norm_sq(const CVector &v) { return kernels::active().norm_sq(v.data().data(), v.dim()); }

cplx inner(const CVector &a, const CVector &b) {
    if (a.dim() != b.dim()) {
        dimension_error("inner: dims " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    }
    return kernels::active().dotc(a.data().data(), b.data().data(), a.dim());
}

CMatrix outer(const CVector &v, const CVector &w) {
    CMatrix m(v.dim(), w.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) {
        for (std::size_t j = 0; j < w.dim(); ++j) {
            m(i, j) = v[i] * std::conj(w[j]);
        }
    }
    return m;
}

double spectral_norm_sq(const CMatrix &a, int iterations) {
    if (a.size() == 0) {
        return 0.0;
    }
    // Power iteration on a†a from a fixed start vector.
    const CMatrix h = matmul(dagger(a), a);
    CVector v(h.cols());
    for (std::size_t i = 0; i < v.dim(); ++i) {
        v[i] = cplx(1.0 + 0.01 * static_cast<double>(i), 0.001 * static_cast<double>(i));
    }
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        double nv = std::sqrt(norm_sq(v));
        if (nv == 0.0) {
            return 0.0;
        }
        for (auto &z : v.data()) {
            z /= nv;
        }
        CVector hv = matvec(h, v);
        lambda = inner(v, hv).real();
        v = std::move(hv);
    }
    return std::max(lambda, 0.0);
}

CMatrix gram_schmidt(const CMatrix &a) {
    if (!a.is_square()) {
        dimension_error("gram_schmidt: matrix " + dims(a) + " is not square");
    }
    const std::size_t n = a.rows();
    const auto &k = kernels::active();
    // Columns stored as rows of the adjoint-free transpose for contiguous access.
    std::vector<std::vector<cplx>> q(n, std::vector<cplx>(n));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            q[j][i] = a(i, j);
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (int sweep = 0; sweep < 2; ++sweep) {
            for (std::size_t i = 0; i < j; ++i) {
                const cplx proj = k.dotc(q[i].data(), q[j].data(), n);
                k.axpy(-proj, q[i].data(), q[j].data(), n);
            }
        }
        const double nrm = std::sqrt(k.norm_sq(q[j].data(), n));
        if (!(nrm >= 1e-12)) {
            std::ostringstream msg;
            msg << "gram_schmidt: column " << j << " is linearly dependent (residual norm " << nrm << ")";
            throw Error(ErrorCategory::rank_deficient, msg.str());
        }
        for (cplx &z : q[j]) {
            z /= nrm;
        }
    }
    CMatrix out(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            out(i, j) = q[j][i];
        }
    }
    return out;
}

QrResult householder_qr(const CMatrix &a) {
    if (!a.is_square()) {
        dimension_error("householder_qr: matrix " + dims(a) + " is not square");
    }
    const std::size_t n = a.rows();
    CMatrix r = a;
    CMatrix q = CMatrix::identity(n);
    std::vector<cplx> v(n);
    for (std::size_t col = 0; col < n; ++col) {
        double xnorm_sq = 0.0;
        for (std::size_t i = col; i < n; ++i) {
            xnorm_sq += std::norm(r(i, col));
        }
        const double xnorm = std::sqrt(xnorm_sq);
        if (xnorm == 0.0) {
            continue;
        }
        const cplx x0 = r(col, col);
        const cplx phase = std::abs(x0) == 0.0 ? cplx(1.0) : x0 / std::abs(x0);
        const cplx alpha = -phase * xnorm;
        // v = x - alpha e1, normalized
        double vnorm_sq = 0.0;
        for (std::size_t i = col; i < n; ++i) {
            v[i] = r(i, col) - (i == col ? alpha : cplx(0.0));
            vnorm_sq += std::norm(v[i]);
        }
        const double vnorm = std::sqrt(vnorm_sq);
        if (vnorm == 0.0) {
            continue;
        }
        for (std::size_t i = col; i < n; ++i) {
            v[i] /= vnorm;
        }
        // R[col:, :] -= 2 v (v† R[col:, :])
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t i = col; i < n; ++i) {
                s += std::conj(v[i]) * r(i, j);
            }
            s *= 2.0;
            for (std::size_t i = col; i < n; ++i) {
                r(i, j) -= v[i] * s;
            }
        }
        for (std::size_t i = col + 1; i < n; ++i) {
            r(i, col) = 0.0;
        }
        // Q[:, col:] -= 2 (Q[:, col:] v) v†
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = 0.0;
            for (std::size_t p = col; p < n; ++p) {
                s += q(i, p) * v[p];
            }
            s *= 2.0;
            for (std::size_t p = col; p < n; ++p) {
                q(i, p) -= s * std::conj(v[p]);
            }
        }
    }
    return {std::move(q), std::move(r)};
}

CMatrix haar_unitary(std::size_t n, std::uint64_t seed) {
    if (n == 0) {
        throw Error(ErrorCategory::invalid_argument, "haar_unitary: n must be positive");
    }
    auto engine = make_engine(seed, RngStream::haar_unitary);
    CMatrix g(n, n);
    for (auto &z : g.data()) {
        z = complex_gaussian(engine);
    }
    auto [q, r] = householder_qr(g);
    for (std::size_t k = 0; k < n; ++k) {
        const double m = std::abs(r(k, k));
        const cplx phase = m == 0.0 ? cplx(1.0) : r(k, k) / m;
        for (std::size_t i = 0; i < n; ++i) {
            q(i, k) *= phase;
        }
    }
    return q;
}

}  // namespace cayley
