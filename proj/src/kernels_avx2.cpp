// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include "cayley/kernels.hpp"

namespace cayley::kernels::avx2 {

namespace {

// A __m256d holds two interleaved complex values: [re0, im0, re1, im1].
inline __m256d load2(const cplx *p) { return _mm256_loadu_pd(reinterpret_cast<const double *>(p)); }

inline void store2(cplx *p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double *>(p), v); }

inline __m256d swap_re_im(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

// Returns (sum of even lanes, sum of odd lanes).
inline void reduce_even_odd(__m256d v, double &even, double &odd) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi);
    even = _mm_cvtsd_f64(s);
    odd = _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

}  // namespace

void axpy(cplx alpha, const cplx *x, cplx *y, std::size_t n) {
    const __m256d ar = _mm256_set1_pd(alpha.real());
    const __m256d ai = _mm256_set1_pd(alpha.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = load2(x + i);
        __m256d t = _mm256_mul_pd(ai, swap_re_im(xv));
        // even lanes: ar*xr - ai*xi, odd lanes: ar*xi + ai*xr
        __m256d prod = _mm256_fmaddsub_pd(ar, xv, t);
        store2(y + i, _mm256_add_pd(load2(y + i), prod));
    }
    if (i < n) {
        scalar::axpy(alpha, x + i, y + i, n - i);
    }
}

cplx dotu(const cplx *x, const cplx *y, std::size_t n) {
    __m256d straight = _mm256_setzero_pd();
    __m256d crossed = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = load2(x + i);
        __m256d yv = load2(y + i);
        straight = _mm256_fmadd_pd(xv, yv, straight);
        crossed = _mm256_fmadd_pd(xv, swap_re_im(yv), crossed);
    }
    double rr, ii, ri, ir;
    reduce_even_odd(straight, rr, ii);
    reduce_even_odd(crossed, ri, ir);
    cplx out(rr - ii, ri + ir);
    if (i < n) {
        out += scalar::dotu(x + i, y + i, n - i);
    }
    return out;
}

cplx dotc(const cplx *x, const cplx *y, std::size_t n) {
    __m256d straight = _mm256_setzero_pd();
    __m256d crossed = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = load2(x + i);
        __m256d yv = load2(y + i);
        straight = _mm256_fmadd_pd(xv, yv, straight);
        crossed = _mm256_fmadd_pd(xv, swap_re_im(yv), crossed);
    }
    double rr, ii, ri, ir;
    reduce_even_odd(straight, rr, ii);
    reduce_even_odd(crossed, ri, ir);
    cplx out(rr + ii, ri - ir);
    if (i < n) {
        out += scalar::dotc(x + i, y + i, n - i);
    }
    return out;
}

double norm_sq(const cplx *x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = load2(x + i);
        acc = _mm256_fmadd_pd(xv, xv, acc);
    }
    double even, odd;
    reduce_even_odd(acc, even, odd);
    double out = even + odd;
    if (i < n) {
        out += scalar::norm_sq(x + i, n - i);
    }
    return out;
}

}  // namespace cayley::kernels::avx2
