#include "ioperiod/detection.hpp"

#include <algorithm>
#include <cmath>

#include "ioperiod/error.hpp"
#include "ioperiod/kernels.hpp"

namespace ioperiod {

std::string_view to_string(Confidence c) noexcept {
    switch (c) {
        case Confidence::High: return "high";
        case Confidence::Moderate: return "moderate";
        case Confidence::Low: return "low";
        case Confidence::NoCandidate: return "none";
    }
    return "none";
}

namespace {

// Relative floor under which the amplitude spread counts as round-off.
constexpr double kDegenerateRelative = 1e-10;

CandidateSet score(std::span<const double> amplitudes, double bin_width, double scale, std::size_t n) {
    if (amplitudes.size() < 2) throw DegenerateSpectrumError("need at least two non-DC bins for Z-scores");
    const auto [mean, sigma] = kernels::mean_std(amplitudes);
    if (!(sigma > kDegenerateRelative * scale))
        throw DegenerateSpectrumError("amplitudes do not vary; Z-scores are undefined");

    std::vector<double> z(amplitudes.size());
    kernels::zscore(amplitudes, mean, sigma, z);

    CandidateSet out;
    out.mean_amplitude = mean;
    out.std_amplitude = sigma;
    out.bin_width = bin_width;
    out.sample_count = n;
    out.entries.reserve(amplitudes.size());
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        const std::size_t k = i + 1;
        out.entries.push_back({k, static_cast<double>(k) * bin_width, amplitudes[i], z[i]});
    }
    return out;
}

}  // namespace

CandidateSet zscores(const Spectrum& spectrum) {
    const auto adjusted = spectrum.adjusted_amplitudes();
    if (adjusted.size() < 3) throw DegenerateSpectrumError("need N >= 4 samples for Z-scores");
    const auto tail = adjusted.subspan(1);
    const double scale = std::max(adjusted[0], *std::max_element(tail.begin(), tail.end()));
    CandidateSet out = score(tail, spectrum.bin_width(), scale, spectrum.sample_count());
    // Use the exact grid frequencies rather than k * (fs/N).
    for (auto& e : out.entries) e.frequency = spectrum.frequency(e.k);
    return out;
}

CandidateSet zscores(std::span<const double> amplitudes, double bin_width) {
    if (amplitudes.empty()) throw DegenerateSpectrumError("no amplitudes");
    const double scale = *std::max_element(amplitudes.begin(), amplitudes.end());
    // Treat the amplitudes as bins 1..M of a transform of length 2M + 1, so
    // that none of them is a Nyquist bin.
    return score(amplitudes, bin_width, scale, 2 * amplitudes.size() + 1);
}

CandidateSet find_candidates(const CandidateSet& zset, const DetectionOptions& options) {
    CandidateSet out = zset;
    out.entries.clear();
    if (zset.entries.empty()) return out;
    double z_max = -INFINITY;
    for (const auto& e : zset.entries)
        if (2 * e.k < zset.sample_count || zset.sample_count == 0) z_max = std::max(z_max, e.z);
    for (const auto& e : zset.entries)
        if (e.z >= options.tolerance * z_max && e.z >= options.z_min) out.entries.push_back(e);
    return out;
}

std::size_t count_outliers(const CandidateSet& zset, double z_min) {
    return static_cast<std::size_t>(
        std::count_if(zset.entries.begin(), zset.entries.end(), [z_min](const Candidate& c) { return c.z > z_min; }));
}

SuppressedHarmonics suppress_harmonics(const CandidateSet& candidates) {
    SuppressedHarmonics out;
    out.kept = candidates;
    out.kept.entries.clear();
    auto sorted = candidates.entries;
    std::sort(sorted.begin(), sorted.end(),
              [](const Candidate& a, const Candidate& b) { return a.frequency < b.frequency; });
    const double half_bin = 0.5 * candidates.bin_width;
    for (const auto& c : sorted) {
        bool harmonic = false;
        for (const auto& base : out.kept.entries) {
            if (!(base.frequency > 0)) continue;
            const double m = std::round(std::log2(c.frequency / base.frequency));
            if (m < 1) continue;
            if (std::abs(c.frequency - std::ldexp(base.frequency, static_cast<int>(m))) <= half_bin) {
                harmonic = true;
                break;
            }
        }
        (harmonic ? out.suppressed : out.kept.entries).push_back(c);
    }
    return out;
}

PeriodicityResult classify(const CandidateSet& candidates, std::vector<Candidate> suppressed) {
    PeriodicityResult r;
    r.candidates = candidates;
    r.suppressed = std::move(suppressed);
    const auto& e = candidates.entries;
    switch (e.size()) {
        case 0: r.confidence = Confidence::NoCandidate; break;
        case 1:
            r.confidence = Confidence::High;
            r.dominant = e.front();
            break;
        case 2: {
            r.confidence = Confidence::Moderate;
            const Candidate& a = e[0];
            const Candidate& b = e[1];
            if (a.amplitude != b.amplitude)
                r.dominant = a.amplitude > b.amplitude ? a : b;
            else
                r.dominant = a.frequency <= b.frequency ? a : b;
            break;
        }
        default: r.confidence = Confidence::Low; break;
    }
    return r;
}

PeriodicityResult detect_periodicity(const Spectrum& spectrum, const DetectionOptions& options) {
    CandidateSet zset;
    try {
        zset = zscores(spectrum);
    } catch (const DegenerateSpectrumError&) {
        return {};
    }
    auto filtered = suppress_harmonics(find_candidates(zset, options));
    auto result = classify(filtered.kept, std::move(filtered.suppressed));
    result.outliers = count_outliers(zset, options.z_min);
    return result;
}

}  // namespace ioperiod
