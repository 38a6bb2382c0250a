#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "ioperiod/sampling.hpp"

namespace ioperiod {

/// Single-sided DFT of a real signal: bins k = 0 .. floor(N/2).
class Spectrum {
public:
    Spectrum() = default;
    Spectrum(std::vector<std::complex<double>> coefficients, std::size_t n_samples, double fs);

    double fs() const noexcept { return fs_; }
    /// Length N of the transformed sequence.
    std::size_t sample_count() const noexcept { return n_; }
    std::size_t bin_count() const noexcept { return coefficients_.size(); }
    /// f_k = k * fs / N.
    double frequency(std::size_t k) const noexcept { return static_cast<double>(k) * fs_ / static_cast<double>(n_); }
    /// 1/Δt.
    double bin_width() const noexcept { return fs_ / static_cast<double>(n_); }
    /// True for the Nyquist bin of an even-length transform, which has no
    /// conjugate partner and is therefore never doubled.
    bool is_nyquist(std::size_t k) const noexcept { return 2 * k == n_; }

    std::span<const std::complex<double>> coefficients() const noexcept { return coefficients_; }
    /// |X_k|
    std::span<const double> amplitudes() const noexcept { return amplitude_; }
    /// 2|X_k| for 1 <= k < N/2, |X_k| for k = 0 and the Nyquist bin.
    std::span<const double> adjusted_amplitudes() const noexcept { return adjusted_; }
    /// atan2(Im X_k, Re X_k)
    std::span<const double> phases() const noexcept { return phase_; }

    /// Every coefficient multiplied by `factor` (unit conversion).
    Spectrum scaled(double factor) const;

private:
    void derive();

    std::vector<std::complex<double>> coefficients_;
    std::vector<double> amplitude_;
    std::vector<double> adjusted_;
    std::vector<double> phase_;
    std::size_t n_ = 0;
    double fs_ = 1.0;
};

Spectrum dft(std::span<const double> samples, double fs);
inline Spectrum dft(const SampledSignal& sampled) { return dft(sampled.samples, sampled.fs); }

/// Sum of the selected cosine components evaluated at sample indices
/// n = 0 .. N-1. Selecting every bin reproduces the transformed samples.
std::vector<double> reconstruct(const Spectrum& spectrum, std::span<const std::size_t> bins);

/// Same, at arbitrary times inside [t0, t0 + N/fs] using a zero-order
/// hold: time t maps to sample index floor((t - t0) * fs).
std::vector<double> reconstruct(const Spectrum& spectrum, std::span<const std::size_t> bins,
                                std::span<const double> times, double t0);

/// Columns k, f_k, amplitude, adjusted_amplitude, phase.
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);
nlohmann::json spectrum_to_json(const Spectrum& spectrum);

}  // namespace ioperiod
