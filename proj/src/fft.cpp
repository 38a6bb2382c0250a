#include "ioperiod/fft.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include "ioperiod/error.hpp"
#include "ioperiod/kernels.hpp"

namespace ioperiod {

using cplx = std::complex<double>;

namespace {

// Largest prime handled by the O(p^2) generic butterfly; beyond this the
// plan switches to Bluestein.
constexpr std::size_t kMaxDirectRadix = 61;

std::vector<std::size_t> factorize(std::size_t n) {
    std::vector<std::size_t> f;
    while (n % 4 == 0) {
        f.push_back(4);
        n /= 4;
    }
    while (n % 2 == 0) {
        f.push_back(2);
        n /= 2;
    }
    for (std::size_t p = 3; p * p <= n; p += 2) {
        while (n % p == 0) {
            f.push_back(p);
            n /= p;
        }
    }
    if (n > 1) f.push_back(n);
    return f;
}

std::vector<cplx> roots_of_unity(std::size_t n) {
    std::vector<cplx> w(n);
    const long double step = 2.0L * std::numbers::pi_v<long double> / static_cast<long double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        const long double a = step * static_cast<long double>(j);
        w[j] = cplx(static_cast<double>(std::cos(a)), static_cast<double>(-std::sin(a)));
    }
    return w;
}

// std::complex operator* goes through the Annex G NaN path; not needed here.
inline cplx mul(cplx a, cplx b) noexcept {
    return {a.real() * b.real() - a.imag() * b.imag(), a.imag() * b.real() + a.real() * b.imag()};
}

}  // namespace

struct FftPlan::Impl {
    // mixed radix
    std::vector<std::size_t> radix;
    std::vector<std::size_t> sizes;
    std::vector<std::vector<cplx>> twiddles;
    std::vector<cplx> roots;
    // Bluestein
    bool bluestein = false;
    std::shared_ptr<const FftPlan> inner;
    std::vector<cplx> chirp;
    std::vector<cplx> kernel_spectrum;

    void build_mixed(std::size_t n) {
        roots = roots_of_unity(n);
        radix = factorize(n);
        std::size_t size = n;
        for (std::size_t p : radix) {
            sizes.push_back(size);
            const std::size_t m = size / p;
            const std::size_t step = n / size;
            std::vector<cplx> tw((p - 1) * m);
            for (std::size_t r = 1; r < p; ++r)
                for (std::size_t k = 0; k < m; ++k) tw[(r - 1) * m + k] = roots[r * k * step];
            twiddles.push_back(std::move(tw));
            size = m;
        }
    }

    void build_bluestein(std::size_t n) {
        bluestein = true;
        std::size_t m = 1;
        while (m < 2 * n - 1) m <<= 1;
        inner = fft_plan(m);
        chirp.resize(n);
        const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n);
        for (std::size_t j = 0; j < n; ++j) {
            // exp(-i pi j^2 / n); reduce j^2 mod 2n exactly before scaling
            const std::uint64_t q = (static_cast<std::uint64_t>(j) * j) % two_n;
            const long double a = std::numbers::pi_v<long double> * static_cast<long double>(q) /
                                  static_cast<long double>(n);
            chirp[j] = cplx(static_cast<double>(std::cos(a)), static_cast<double>(-std::sin(a)));
        }
        kernel_spectrum.assign(m, cplx(0.0, 0.0));
        kernel_spectrum[0] = std::conj(chirp[0]);
        for (std::size_t j = 1; j < n; ++j) {
            kernel_spectrum[j] = std::conj(chirp[j]);
            kernel_spectrum[m - j] = std::conj(chirp[j]);
        }
        inner->forward(kernel_spectrum);
    }

    void transform(const cplx* in, std::size_t stride, cplx* out, std::size_t level) const {
        const std::size_t n = sizes[level];
        const std::size_t p = radix[level];
        const std::size_t m = n / p;
        if (m == 1) {
            for (std::size_t r = 0; r < p; ++r) out[r] = in[r * stride];
        } else {
            for (std::size_t r = 0; r < p; ++r) transform(in + r * stride, stride * p, out + r * m, level + 1);
            const auto& tw = twiddles[level];
            for (std::size_t r = 1; r < p; ++r)
                kernels::active().complex_multiply(out + r * m, tw.data() + (r - 1) * m, m);
        }

        if (p == 2) {
            kernels::active().butterfly2(out, out + m, m);
        } else if (p == 4) {
            for (std::size_t k = 0; k < m; ++k) {
                const cplx a0 = out[k], a1 = out[m + k], a2 = out[2 * m + k], a3 = out[3 * m + k];
                const cplx t0 = a0 + a2, t1 = a0 - a2, t2 = a1 + a3;
                const cplx d = a1 - a3;
                const cplx t3(d.imag(), -d.real());  // (a1 - a3) * -i
                out[k] = t0 + t2;
                out[m + k] = t1 + t3;
                out[2 * m + k] = t0 - t2;
                out[3 * m + k] = t1 - t3;
            }
        } else {
            const std::size_t step = roots.size() / p;
            std::vector<cplx> tmp(p);
            for (std::size_t k = 0; k < m; ++k) {
                for (std::size_t r = 0; r < p; ++r) tmp[r] = out[r * m + k];
                for (std::size_t q = 0; q < p; ++q) {
                    cplx acc = tmp[0];
                    for (std::size_t r = 1; r < p; ++r) acc += mul(tmp[r], roots[((r * q) % p) * step]);
                    out[q * m + k] = acc;
                }
            }
        }
    }

    void forward_mixed(std::span<cplx> data) const {
        std::vector<cplx> out(data.size());
        transform(data.data(), 1, out.data(), 0);
        std::copy(out.begin(), out.end(), data.begin());
    }

    void forward_bluestein(std::span<cplx> data) const {
        const std::size_t n = data.size();
        const std::size_t m = kernel_spectrum.size();
        std::vector<cplx> a(m, cplx(0.0, 0.0));
        std::copy(data.begin(), data.end(), a.begin());
        kernels::active().complex_multiply(a.data(), chirp.data(), n);
        inner->forward(a);
        kernels::active().complex_multiply(a.data(), kernel_spectrum.data(), m);
        inner->inverse(a);
        const double scale = 1.0 / static_cast<double>(m);
        for (std::size_t k = 0; k < n; ++k) data[k] = a[k] * scale;
        kernels::active().complex_multiply(data.data(), chirp.data(), n);
    }
};

FftPlan::FftPlan(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
    if (n == 0) throw ArgumentError("FFT length must be positive");
    if (n == 1) return;
    const auto f = factorize(n);
    if (*std::max_element(f.begin(), f.end()) > kMaxDirectRadix)
        impl_->build_bluestein(n);
    else
        impl_->build_mixed(n);
}

FftPlan::~FftPlan() = default;

bool FftPlan::uses_bluestein() const noexcept { return impl_->bluestein; }

void FftPlan::forward(std::span<cplx> data) const {
    if (data.size() != n_) throw ArgumentError("FFT input length does not match the plan");
    if (n_ == 1) return;
    if (impl_->bluestein)
        impl_->forward_bluestein(data);
    else
        impl_->forward_mixed(data);
}

void FftPlan::inverse(std::span<cplx> data) const {
    for (auto& v : data) v = std::conj(v);
    forward(data);
    for (auto& v : data) v = std::conj(v);
}

std::shared_ptr<const FftPlan> fft_plan(std::size_t n) {
    static std::mutex mutex;
    static std::unordered_map<std::size_t, std::shared_ptr<const FftPlan>> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(n); it != cache.end()) return it->second;
    }
    // Built outside the lock: a Bluestein plan requests its inner plan.
    auto plan = std::make_shared<const FftPlan>(n);
    std::lock_guard lock(mutex);
    if (cache.size() >= 256) cache.clear();
    return cache.emplace(n, std::move(plan)).first->second;
}

std::vector<cplx> fft(std::span<const cplx> x) {
    std::vector<cplx> data(x.begin(), x.end());
    if (!data.empty()) fft_plan(data.size())->forward(data);
    return data;
}

std::vector<cplx> rfft(std::span<const double> x) {
    if (x.empty()) return {};
    std::vector<cplx> data(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) data[i] = cplx(x[i], 0.0);
    fft_plan(data.size())->forward(data);
    data.resize(x.size() / 2 + 1);
    return data;
}

}  // namespace ioperiod
