#include <cmath>

#include "ioperiod/kernels.hpp"

namespace ioperiod::kernels {
namespace {

void complex_multiply(cplx* a, const cplx* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        a[i] = cplx(ar * br - ai * bi, ai * br + ar * bi);
    }
}

void butterfly2(cplx* lo, cplx* hi, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const cplx u = lo[i], v = hi[i];
        lo[i] = cplx(u.real() + v.real(), u.imag() + v.imag());
        hi[i] = cplx(u.real() - v.real(), u.imag() - v.imag());
    }
}

void magnitude(const cplx* in, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double re = in[i].real(), im = in[i].imag();
        out[i] = std::sqrt(re * re + im * im);
    }
}

double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

MeanStd mean_std(const double* x, std::size_t n) {
    if (n == 0) return {0.0, 0.0};
    const double mean = sum(x, n) / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - mean;
        ss += d * d;
    }
    return {mean, std::sqrt(ss / static_cast<double>(n))};
}

void zscore(const double* x, double mean, double sigma, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (x[i] - mean) / sigma;
}

Exceedance sum_above(const double* x, double threshold, std::size_t n) {
    Exceedance e{0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] > threshold) {
            ++e.count;
            e.sum += x[i];
        }
    }
    return e;
}

}  // namespace

const KernelTable& scalar_table() noexcept {
    static const KernelTable table{
        "scalar", complex_multiply, butterfly2, magnitude, sum, mean_std, zscore, sum_above,
    };
    return table;
}

}  // namespace ioperiod::kernels
