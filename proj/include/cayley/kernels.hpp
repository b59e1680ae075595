#pragma once

// Data-parallel inner loops used by the dense complex routines. Each kernel has
// a portable scalar reference and, on x86-64, an AVX2/FMA variant. The variant
// is chosen once at startup from CPUID and can be overridden with the
// CAYLEY_KERNELS environment variable ("scalar" or "avx2") or set_backend().

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace cayley::kernels {

using cplx = std::complex<double>;

enum class Backend { scalar, avx2 };

struct KernelTable {
    // y[i] += alpha * x[i]
    void (*axpy)(cplx alpha, const cplx *x, cplx *y, std::size_t n);
    // sum x[i] * y[i]
    cplx (*dotu)(const cplx *x, const cplx *y, std::size_t n);
    // sum conj(x[i]) * y[i]
    cplx (*dotc)(const cplx *x, const cplx *y, std::size_t n);
    // sum |x[i]|^2
    double (*norm_sq)(const cplx *x, std::size_t n);
};

namespace scalar {
void axpy(cplx alpha, const cplx *x, cplx *y, std::size_t n);
cplx dotu(const cplx *x, const cplx *y, std::size_t n);
cplx dotc(const cplx *x, const cplx *y, std::size_t n);
double norm_sq(const cplx *x, std::size_t n);
}  // namespace scalar

#if defined(CAYLEY_HAVE_AVX2)
namespace avx2 {
void axpy(cplx alpha, const cplx *x, cplx *y, std::size_t n);
cplx dotu(const cplx *x, const cplx *y, std::size_t n);
cplx dotc(const cplx *x, const cplx *y, std::size_t n);
double norm_sq(const cplx *x, std::size_t n);
}  // namespace avx2
#endif

/// True when the backend was compiled in and the running CPU supports it.
bool backend_available(Backend backend) noexcept;

/// The active table. Never null.
const KernelTable &active() noexcept;

/// Table for a specific backend; throws if it is unavailable.
const KernelTable &table(Backend backend);

Backend active_backend() noexcept;

/// Switches the active backend for the whole process. Not meant to be called
/// while other threads are running numerics.
void set_backend(Backend backend);

std::string_view backend_name(Backend backend) noexcept;

// Span conveniences over the active table.
inline void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}
inline cplx dotu(std::span<const cplx> x, std::span<const cplx> y) {
    return active().dotu(x.data(), y.data(), x.size());
}
inline cplx dotc(std::span<const cplx> x, std::span<const cplx> y) {
    return active().dotc(x.data(), y.data(), x.size());
}
inline double norm_sq(std::span<const cplx> x) { return active().norm_sq(x.data(), x.size()); }

}  // namespace cayley::kernels
