#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace ioperiod {

/// Complex DFT of arbitrary length. Lengths whose prime factors are all
/// small use a mixed-radix Cooley-Tukey recursion; anything else goes
/// through Bluestein's chirp-z convolution on a power-of-two plan. No zero
/// padding of the caller's data ever happens, so bin k is always k/N.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::size_t size() const noexcept { return n_; }
    bool uses_bluestein() const noexcept;

    /// X_k = sum_n x_n exp(-2 pi i k n / N), in place.
    void forward(std::span<std::complex<double>> data) const;
    /// Unnormalised inverse (sign +), in place.
    void inverse(std::span<std::complex<double>> data) const;

private:
    struct Impl;
    std::size_t n_;
    std::unique_ptr<Impl> impl_;
};

/// Shared, immutable plan for length n. Thread-safe.
std::shared_ptr<const FftPlan> fft_plan(std::size_t n);

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x);
/// First floor(N/2)+1 coefficients of the DFT of a real sequence.
std::vector<std::complex<double>> rfft(std::span<const double> x);

}  // namespace ioperiod
