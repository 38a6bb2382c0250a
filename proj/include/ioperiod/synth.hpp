#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "ioperiod/analysis.hpp"
#include "ioperiod/trace.hpp"

namespace ioperiod::synth {

/// One recorded I/O phase: per-process request streams starting at t = 0.
struct PhaseTemplate {
    std::vector<IoRequest> requests;  // rank = process index
    std::vector<double> process_end;  // last end time per process
    double duration = 0.0;            // max of process_end

    std::size_t processes() const noexcept { return process_end.size(); }
    std::uint64_t volume() const noexcept;
    /// Builds a template from a trace: times are shifted so the earliest
    /// request starts at 0, ranks are kept.
    static PhaseTemplate from_trace(const Trace& trace);
};

using PhaseLibrary = std::vector<PhaseTemplate>;

inline constexpr std::size_t kBundledTemplates = 20;
inline constexpr std::size_t kBundledProcesses = 32;
inline constexpr std::size_t kBundledRequests = 3584;
inline constexpr std::uint64_t kBundledRequestBytes = std::uint64_t{1} << 20;
inline constexpr double kMinPhase = 10.4;
inline constexpr double kMaxPhase = 14.7;

/// Procedural templates: 32 processes each writing 3584 requests of 1 MiB
/// with jittered durations; phase length 10.4 s plus an exponential tail
/// of mean 0.6 s, capped at 14.7 s. Built once, shared.
const PhaseLibrary& bundled_phase_templates();

/// Every *.jsonl file in `dir`, one template per file, in name order.
PhaseLibrary load_phase_templates(const std::filesystem::path& dir);

double mean_duration(const PhaseLibrary& library);

enum class NoiseLevel { None, Low, High };

std::string_view to_string(NoiseLevel level) noexcept;
NoiseLevel parse_noise_level(std::string_view text);
/// Burst bandwidth in bytes/s: 0, 500 MB/s, 1 GB/s.
double noise_bandwidth(NoiseLevel level) noexcept;

inline constexpr double kNoisePeriod = 2.2;
inline constexpr std::size_t kNoisePeriodsPerTrace = 10;

struct SynthConfig {
    std::size_t iterations = 20;  // J
    std::size_t processes = 32;   // P
    double mu = 11.0;             // mean compute time, s
    double sigma = 0.0;           // compute time std, s
    double phi = 0.0;             // mean desynchronisation, s
    NoiseLevel noise = NoiseLevel::None;
    std::uint64_t seed = 0;
    /// Bundled templates when null.
    const PhaseLibrary* templates = nullptr;
};

struct GroundTruth {
    std::vector<double> iteration_starts;  // I/O phase starts
    std::vector<TimeWindow> phase_bounds;
    std::vector<double> compute_times;
    std::vector<std::size_t> template_ids;
    double lambda_avg = 0.0;  // mean start-to-start distance; 0 if J = 1
    double trace_end = 0.0;
    /// Summed phase lengths over [0, trace_end].
    double r_io = 0.0;
    std::uint64_t app_volume = 0;
    std::uint64_t noise_volume = 0;
};

struct Generated {
    Trace trace;
    GroundTruth truth;
};

/// Iteration j: compute for t_cpu ~ N(mu, sigma) (redrawn while <= 0), then
/// one randomly chosen template with process k >= 1 delayed by
/// delta_k ~ Exp(mean phi). The trace starts with a compute phase at t = 0
/// and the next compute phase starts when the last process finishes.
Generated generate(const SynthConfig& config);

/// |lambda_detected - lambda_avg| / lambda_avg; absent without a detection.
std::optional<double> detection_error(std::optional<double> lambda_detected, const GroundTruth& truth);

struct SweepGrid {
    std::vector<NoiseLevel> noise{NoiseLevel::None};
    std::vector<double> cpu_ratio{1.0};  // mu / mean phase length
    std::vector<double> cv{0.0};         // sigma / mu
    std::vector<double> phi_ratio{0.0};  // phi / mean phase length
    std::size_t repetitions = 30;
    std::size_t iterations = 20;
    std::size_t processes = 32;
    std::uint64_t seed = 0;
    AnalysisOptions analysis = [] {
        AnalysisOptions o;
        o.fs = 1.0;
        return o;
    }();
    /// Worker threads; 0 picks the hardware concurrency.
    std::size_t threads = 0;

    std::size_t combinations() const noexcept {
        return noise.size() * cpu_ratio.size() * cv.size() * phi_ratio.size();
    }
};

/// key = value lines; lists are comma separated; '#' starts a comment.
/// Keys: noise, cpu_ratio, cv, phi_ratio, repetitions, iterations,
/// processes, seed, fs, threads.
SweepGrid parse_sweep_config(std::istream& in);

struct SweepRow {
    std::size_t combination = 0;
    NoiseLevel noise = NoiseLevel::None;
    double cpu_ratio = 0.0;
    double cv = 0.0;
    double phi_ratio = 0.0;
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
    double lambda_avg = 0.0;
    std::optional<double> lambda_detected;
    std::optional<double> error;
    Confidence confidence = Confidence::NoCandidate;
    std::optional<double> sigma_vol;
    std::optional<double> sigma_time;
    std::optional<double> score;
    double r_io = 0.0;
    double r_io_truth = 0.0;
};

/// Seed for one repetition, derived from (seed, combination, repetition).
std::uint64_t derive_seed(std::uint64_t seed, std::size_t combination, std::size_t repetition);

/// Rows ordered by (combination, repetition); identical for a fixed seed
/// whatever the thread count.
std::vector<SweepRow> sweep(const SweepGrid& grid, const PhaseLibrary& library = bundled_phase_templates());

struct CellSummary {
    std::size_t combination = 0;
    NoiseLevel noise = NoiseLevel::None;
    double cpu_ratio = 0.0;
    double cv = 0.0;
    double phi_ratio = 0.0;
    std::size_t traces = 0;
    std::size_t detections = 0;
    /// Over traces with a detection.
    std::optional<double> median_error;
    std::optional<double> max_error;
    double non_high_share = 0.0;
    std::optional<double> median_score;
    double max_r_io_deviation = 0.0;  // relative to the truth
};

std::vector<CellSummary> summarize(const std::vector<SweepRow>& rows);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells);
/// Ground truth as one JSON object.
void write_ground_truth(std::ostream& out, const GroundTruth& truth);

}  // namespace ioperiod::synth
