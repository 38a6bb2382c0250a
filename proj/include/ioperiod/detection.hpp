#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ioperiod/spectral.hpp"

namespace ioperiod {

enum class Confidence { High, Moderate, Low, NoCandidate };

std::string_view to_string(Confidence c) noexcept;

struct Candidate {
    std::size_t k = 0;
    double frequency = 0.0;
    double amplitude = 0.0;  // adjusted single-sided amplitude
    double z = 0.0;
};

/// Bins k >= 1 with their Z-scores, or the filtered candidates drawn from
/// them. `bin_width` is 1/Δt and sets the harmonic-matching tolerance.
struct CandidateSet {
    std::vector<Candidate> entries;
    double mean_amplitude = 0.0;
    double std_amplitude = 0.0;
    double bin_width = 0.0;
    std::size_t sample_count = 0;
};

struct DetectionOptions {
    double tolerance = 0.8;
    double z_min = 3.0;
};

/// z_k = (A_k - mean(A)) / pstd(A) over k in [1, N/2] using the adjusted
/// amplitudes. Throws DegenerateSpectrumError when the amplitudes do not
/// vary (constant or empty input).
CandidateSet zscores(const Spectrum& spectrum);
/// Same, from raw adjusted amplitudes for k = 1, 2, ...; f_k = k * bin_width.
CandidateSet zscores(std::span<const double> amplitudes, double bin_width);

/// Keeps entries with z >= tolerance * max(z) and z >= z_min. The maximum
/// runs over k in [1, N/2): the Nyquist bin of an even-length transform is
/// scanned but does not set the bar.
CandidateSet find_candidates(const CandidateSet& zset, const DetectionOptions& options = {});

/// Number of entries with z > z_min (plain outlier count).
std::size_t count_outliers(const CandidateSet& zset, double z_min = 3.0);

struct SuppressedHarmonics {
    CandidateSet kept;
    std::vector<Candidate> suppressed;
};

/// Drops every candidate lying within half a bin of 2^m times a lower
/// surviving candidate (m >= 1). Output is sorted by frequency.
SuppressedHarmonics suppress_harmonics(const CandidateSet& candidates);

struct PeriodicityResult {
    Confidence confidence = Confidence::NoCandidate;
    std::optional<Candidate> dominant;
    CandidateSet candidates;  // after harmonic suppression
    std::vector<Candidate> suppressed;
    std::size_t outliers = 0;

    std::optional<double> frequency() const {
        return dominant ? std::optional<double>(dominant->frequency) : std::nullopt;
    }
    std::optional<double> period() const {
        return dominant ? std::optional<double>(1.0 / dominant->frequency) : std::nullopt;
    }
};

/// 1 candidate: High. 2: Moderate, the larger amplitude wins (ties go to the
/// lower frequency). 3 or more: Low, no dominant frequency. 0: NoCandidate.
PeriodicityResult classify(const CandidateSet& candidates, std::vector<Candidate> suppressed = {});

/// zscores -> find_candidates -> suppress_harmonics -> classify. A
/// degenerate spectrum yields NoCandidate instead of throwing.
PeriodicityResult detect_periodicity(const Spectrum& spectrum, const DetectionOptions& options = {});

}  // namespace ioperiod
