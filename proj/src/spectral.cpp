#include "ioperiod/spectral.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "ioperiod/error.hpp"
#include "ioperiod/fft.hpp"
#include "ioperiod/kernels.hpp"

namespace ioperiod {

Spectrum::Spectrum(std::vector<std::complex<double>> coefficients, std::size_t n_samples, double fs)
    : coefficients_(std::move(coefficients)), n_(n_samples), fs_(fs) {
    if (coefficients_.size() != n_ / 2 + 1) throw ArgumentError("spectrum must hold floor(N/2)+1 bins");
    derive();
}

void Spectrum::derive() {
    amplitude_.resize(coefficients_.size());
    kernels::magnitude(coefficients_, amplitude_);
    adjusted_.resize(amplitude_.size());
    phase_.resize(amplitude_.size());
    for (std::size_t k = 0; k < amplitude_.size(); ++k) {
        adjusted_[k] = (k == 0 || is_nyquist(k)) ? amplitude_[k] : 2.0 * amplitude_[k];
        phase_[k] = std::atan2(coefficients_[k].imag(), coefficients_[k].real());
    }
}

Spectrum Spectrum::scaled(double factor) const {
    Spectrum out = *this;
    for (auto& c : out.coefficients_) c *= factor;
    out.derive();
    return out;
}

Spectrum dft(std::span<const double> samples, double fs) {
    if (samples.size() < 2) throw ArgumentError("DFT needs at least two samples");
    if (!(fs > 0)) throw ArgumentError("sampling frequency must be positive");
    return Spectrum(rfft(samples), samples.size(), fs);
}

namespace {

double component(const Spectrum& s, std::size_t k, std::size_t n) {
    const std::size_t N = s.sample_count();
    const auto X = s.coefficients()[k];
    if (k == 0) return X.real();
    const double weight = s.is_nyquist(k) ? 1.0 : 2.0;
    // Reduce k*n mod N before scaling so the argument stays accurate.
    const double angle = 2.0 * std::numbers::pi * static_cast<double>((k * n) % N) / static_cast<double>(N);
    return weight * s.amplitudes()[k] * std::cos(angle + s.phases()[k]);
}

void check_bins(const Spectrum& s, std::span<const std::size_t> bins) {
    for (auto k : bins)
        if (k >= s.bin_count())
            throw ArgumentError("bin " + std::to_string(k) + " outside [0, " + std::to_string(s.bin_count() - 1) + "]");
}

}  // namespace

std::vector<double> reconstruct(const Spectrum& spectrum, std::span<const std::size_t> bins) {
    check_bins(spectrum, bins);
    const std::size_t N = spectrum.sample_count();
    std::vector<double> out(N, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        double acc = 0.0;
        for (auto k : bins) acc += component(spectrum, k, n);
        out[n] = acc / static_cast<double>(N);
    }
    return out;
}

std::vector<double> reconstruct(const Spectrum& spectrum, std::span<const std::size_t> bins,
                                std::span<const double> times, double t0) {
    check_bins(spectrum, bins);
    const std::size_t N = spectrum.sample_count();
    const double t_end = t0 + static_cast<double>(N) / spectrum.fs();
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) {
        if (t < t0 || t > t_end) throw ArgumentError("reconstruction time outside the sampled window");
        auto n = static_cast<std::size_t>(std::floor((t - t0) * spectrum.fs()));
        if (n >= N) n = N - 1;
        double acc = 0.0;
        for (auto k : bins) acc += component(spectrum, k, n);
        out.push_back(acc / static_cast<double>(N));
    }
    return out;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
    out << "k,f_k,amplitude,adjusted_amplitude,phase\n";
    const auto prec = out.precision(17);
    for (std::size_t k = 0; k < s.bin_count(); ++k)
        out << k << ',' << s.frequency(k) << ',' << s.amplitudes()[k] << ',' << s.adjusted_amplitudes()[k] << ','
            << s.phases()[k] << '\n';
    out.precision(prec);
}

nlohmann::json spectrum_to_json(const Spectrum& s) {
    nlohmann::json bins = nlohmann::json::array();
    for (std::size_t k = 0; k < s.bin_count(); ++k)
        bins.push_back({{"k", k},
                        {"f_k", s.frequency(k)},
                        {"amplitude", s.amplitudes()[k]},
                        {"adjusted_amplitude", s.adjusted_amplitudes()[k]},
                        {"phase", s.phases()[k]}});
    return {{"fs", s.fs()}, {"n", s.sample_count()}, {"bins", std::move(bins)}};
}

}  // namespace ioperiod
