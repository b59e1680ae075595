#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "cayley/error.hpp"

namespace cayley {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major.
class CMatrix {
  public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols);
    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data);
    /// Row-wise literal: CMatrix{{1, 0}, {0, 1}}.
    CMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static CMatrix zeros(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }
    static CMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool is_square() const noexcept { return rows_ == cols_; }

    cplx &operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const cplx &operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<cplx> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const cplx> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::span<cplx> data() noexcept { return data_; }
    std::span<const cplx> data() const noexcept { return data_; }

    bool all_finite() const noexcept;

    CMatrix &operator+=(const CMatrix &other);
    CMatrix &operator-=(const CMatrix &other);
    CMatrix &operator*=(cplx s) noexcept;

    friend bool operator==(const CMatrix &a, const CMatrix &b) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

CMatrix operator+(CMatrix a, const CMatrix &b);
CMatrix operator-(CMatrix a, const CMatrix &b);
CMatrix operator*(cplx s, CMatrix a);

/// Dense complex column vector.
class CVector {
  public:
    CVector() = default;
    explicit CVector(std::size_t dim) : data_(dim) {}
    explicit CVector(std::vector<cplx> data) : data_(std::move(data)) {}
    CVector(std::initializer_list<cplx> values) : data_(values) {}

    static CVector basis(std::size_t dim, std::size_t index);

    std::size_t dim() const noexcept { return data_.size(); }
    cplx &operator[](std::size_t i) noexcept { return data_[i]; }
    const cplx &operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<cplx> data() noexcept { return data_; }
    std::span<const cplx> data() const noexcept { return data_; }

    friend bool operator==(const CVector &a, const CVector &b) = default;

  private:
    std::vector<cplx> data_;
};

CMatrix matmul(const CMatrix &a, const CMatrix &b);
CVector matvec(const CMatrix &a, const CVector &x);
CMatrix dagger(const CMatrix &a);

/// Solves a·X = b by LU with partial pivoting. Throws SingularMatrixError when a
/// pivot falls below n·eps·max|a_ij|.
CMatrix solve_linear(const CMatrix &a, const CMatrix &b);

double frobenius_norm_sq(const CMatrix &a);
cplx trace(const CMatrix &a);
/// tr(a†·b) without forming the product.
cplx trace_adjoint_product(const CMatrix &a, const CMatrix &b);
CMatrix kron(const CMatrix &a, const CMatrix &b);

double norm_sq(const CVector &v);
cplx inner(const CVector &a, const CVector &b);  // <a|b>, conjugate-linear in a
/// |v><w|
CMatrix outer(const CVector &v, const CVector &w);

/// Largest squared singular value; used only for reporting the spectral
/// variant of the unitarity error.
double spectral_norm_sq(const CMatrix &a, int iterations = 200);

/// Modified Gram-Schmidt over the columns of a square matrix, with one
/// reorthogonalization sweep. Throws Error(rank_deficient) when a column's norm
/// drops below 1e-12 after projection.
CMatrix gram_schmidt(const CMatrix &a);

struct QrResult {
    CMatrix q;
    CMatrix r;
};

/// Householder QR of a square matrix: a = q·r, q unitary, r upper triangular.
QrResult householder_qr(const CMatrix &a);

/// Haar-distributed n×n unitary: QR of a standard complex Gaussian matrix with
/// the diagonal-phase correction Q ← Q·diag(r_kk/|r_kk|).
CMatrix haar_unitary(std::size_t n, std::uint64_t seed);

}  // namespace cayley
