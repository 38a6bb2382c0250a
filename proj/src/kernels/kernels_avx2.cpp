// Compiled with -mavx2 -mfma; only reached through avx2_table() after a
// CPUID check in dispatch.cpp.

#include <immintrin.h>

#include <cmath>

#include "ioperiod/kernels.hpp"

namespace ioperiod::kernels {
namespace {

inline double* as_doubles(cplx* p) { return reinterpret_cast<double*>(p); }
inline const double* as_doubles(const cplx* p) { return reinterpret_cast<const double*>(p); }

inline double horizontal_sum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

void complex_multiply(cplx* a, const cplx* b, std::size_t n) {
    double* pa = as_doubles(a);
    const double* pb = as_doubles(b);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d va = _mm256_loadu_pd(pa + 2 * i);
        __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        __m256d b_re = _mm256_movedup_pd(vb);         // br br
        __m256d b_im = _mm256_permute_pd(vb, 0xF);    // bi bi
        __m256d a_swap = _mm256_permute_pd(va, 0x5);  // ai ar
        __m256d cross = _mm256_mul_pd(a_swap, b_im);  // ai*bi ar*bi
        // even lanes: ar*br - ai*bi, odd lanes: ai*br + ar*bi
        _mm256_storeu_pd(pa + 2 * i, _mm256_fmaddsub_pd(va, b_re, cross));
    }
    for (; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        a[i] = cplx(ar * br - ai * bi, ai * br + ar * bi);
    }
}

void butterfly2(cplx* lo, cplx* hi, std::size_t n) {
    double* pl = as_doubles(lo);
    double* ph = as_doubles(hi);
    const std::size_t len = 2 * n;
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        __m256d u = _mm256_loadu_pd(pl + i);
        __m256d v = _mm256_loadu_pd(ph + i);
        _mm256_storeu_pd(pl + i, _mm256_add_pd(u, v));
        _mm256_storeu_pd(ph + i, _mm256_sub_pd(u, v));
    }
    for (; i < len; ++i) {
        const double u = pl[i], v = ph[i];
        pl[i] = u + v;
        ph[i] = u - v;
    }
}

void magnitude(const cplx* in, double* out, std::size_t n) {
    const double* p = as_doubles(in);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d c01 = _mm256_loadu_pd(p + 2 * i);
        __m256d c23 = _mm256_loadu_pd(p + 2 * i + 4);
        __m256d s = _mm256_hadd_pd(_mm256_mul_pd(c01, c01), _mm256_mul_pd(c23, c23));
        // hadd yields |c0|^2 |c2|^2 |c1|^2 |c3|^2
        s = _mm256_permute4x64_pd(s, 0xD8);
        _mm256_storeu_pd(out + i, _mm256_sqrt_pd(s));
    }
    for (; i < n; ++i) {
        const double re = in[i].real(), im = in[i].imag();
        out[i] = std::sqrt(re * re + im * im);
    }
}

double sum(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    double s = horizontal_sum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i];
    return s;
}

MeanStd mean_std(const double* x, std::size_t n) {
    if (n == 0) return {0.0, 0.0};
    const double mean = sum(x, n) / static_cast<double>(n);
    const __m256d vmean = _mm256_set1_pd(mean);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), vmean);
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double ss = horizontal_sum(acc);
    for (; i < n; ++i) {
        const double d = x[i] - mean;
        ss += d * d;
    }
    return {mean, std::sqrt(ss / static_cast<double>(n))};
}

void zscore(const double* x, double mean, double sigma, double* out, std::size_t n) {
    const __m256d vmean = _mm256_set1_pd(mean);
    const __m256d vsigma = _mm256_set1_pd(sigma);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), vmean), vsigma));
    for (; i < n; ++i) out[i] = (x[i] - mean) / sigma;
}

Exceedance sum_above(const double* x, double threshold, std::size_t n) {
    const __m256d vt = _mm256_set1_pd(threshold);
    __m256d acc = _mm256_setzero_pd();
    std::size_t count = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        __m256d mask = _mm256_cmp_pd(v, vt, _CMP_GT_OQ);
        acc = _mm256_add_pd(acc, _mm256_and_pd(mask, v));
        count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(mask))));
    }
    double s = horizontal_sum(acc);
    for (; i < n; ++i) {
        if (x[i] > threshold) {
            ++count;
            s += x[i];
        }
    }
    return {count, s};
}

}  // namespace

const KernelTable& avx2_kernels() noexcept {
    static const KernelTable table{
        "avx2", complex_multiply, butterfly2, magnitude, sum, mean_std, zscore, sum_above,
    };
    return table;
}

}  // namespace ioperiod::kernels
