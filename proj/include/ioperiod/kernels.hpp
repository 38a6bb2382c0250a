#pragma once

// Data-parallel inner loops shared by the FFT, the Z-score filter and the
// metrics. Every kernel has a scalar reference implementation; an AVX2
// variant is selected at runtime when the CPU supports it. Set
// IOPERIOD_SIMD=scalar in the environment to force the reference path.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace ioperiod::kernels {

using cplx = std::complex<double>;

struct MeanStd {
    double mean;
    double stddev;  // population
};

struct Exceedance {
    std::size_t count;
    double sum;
};

struct KernelTable {
    std::string_view name;
    // a[i] *= b[i]
    void (*complex_multiply)(cplx* a, const cplx* b, std::size_t n);
    // (lo, hi) <- (lo + hi, lo - hi)
    void (*butterfly2)(cplx* lo, cplx* hi, std::size_t n);
    // out[i] = sqrt(re^2 + im^2)
    void (*magnitude)(const cplx* in, double* out, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    MeanStd (*mean_std)(const double* x, std::size_t n);
    // out[i] = (x[i] - mean) / sigma
    void (*zscore)(const double* x, double mean, double sigma, double* out, std::size_t n);
    // count and sum of x[i] > threshold
    Exceedance (*sum_above)(const double* x, double threshold, std::size_t n);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table() noexcept;
/// Table used by the free functions below.
const KernelTable& active() noexcept;
/// Overrides the runtime choice (tests, benchmarking). Not thread-safe with
/// respect to concurrent kernel calls; set it before starting work.
void set_active(const KernelTable& table) noexcept;

inline void complex_multiply(std::span<cplx> a, std::span<const cplx> b) {
    active().complex_multiply(a.data(), b.data(), a.size());
}
inline void butterfly2(std::span<cplx> lo, std::span<cplx> hi) {
    active().butterfly2(lo.data(), hi.data(), lo.size());
}
inline void magnitude(std::span<const cplx> in, std::span<double> out) {
    active().magnitude(in.data(), out.data(), in.size());
}
inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }
inline MeanStd mean_std(std::span<const double> x) { return active().mean_std(x.data(), x.size()); }
inline void zscore(std::span<const double> x, double mean, double sigma, std::span<double> out) {
    active().zscore(x.data(), mean, sigma, out.data(), x.size());
}
inline Exceedance sum_above(std::span<const double> x, double threshold) {
    return active().sum_above(x.data(), threshold, x.size());
}

}  // namespace ioperiod::kernels
