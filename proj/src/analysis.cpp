#include "ioperiod/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ioperiod/error.hpp"

namespace ioperiod {

namespace {

void rescale(PeriodicityResult& r, double unit) {
    if (unit == 1.0) return;
    auto fix = [unit](Candidate& c) { c.amplitude *= unit; };
    for (auto& c : r.candidates.entries) fix(c);
    for (auto& c : r.suppressed) fix(c);
    if (r.dominant) fix(*r.dominant);
    r.candidates.mean_amplitude *= unit;
    r.candidates.std_amplitude *= unit;
}

void rescale(SubstantialIo& s, double unit) {
    s.threshold *= unit;
    if (s.b_io) *s.b_io *= unit;
    s.substantial_volume *= unit;
    s.total_volume *= unit;
}

}  // namespace

TimeWindow default_window(const Trace& trace) {
    if (trace.empty()) return {0.0, 0.0};
    return {std::min(0.0, trace.start_time()), trace.end_time()};
}

AnalysisResult analyze(const Trace& input, const AnalysisOptions& options) {
    if (!(options.fs > 0) || !std::isfinite(options.fs)) throw ArgumentError("sampling frequency must be positive");
    if (options.window && !(options.window->hi > options.window->lo))
        throw ArgumentError("analysis window must have hi > lo");

    const auto reqs = input.requests();
    const bool all_match = std::all_of(reqs.begin(), reqs.end(), [&](const IoRequest& r) { return r.matches(options.kind); });
    std::optional<Trace> kept;
    if (!all_match) kept = input.filtered(options.kind);
    const Trace& trace = kept ? *kept : input;
    AnalysisResult r;
    r.fs = options.fs;
    r.window = options.window.value_or(default_window(trace));

    if (trace.volume() == 0) {
        r.no_data = true;
        r.warnings.push_back("no " + std::string(to_string(options.kind)) + " I/O in trace");
        return r;
    }

    const std::uint64_t quantum = trace.byte_quantum();
    const double unit = static_cast<double>(quantum);
    const BandwidthSignal signal = merge_bandwidth(trace, quantum);

    r.sample_count = sample_count(options.fs, r.window);
    if (r.sample_count < 4) {
        std::ostringstream msg;
        msg << "window of " << r.window.length() << " s holds only " << r.sample_count
            << " samples at " << options.fs << " Hz; need at least 4";
        r.warnings.push_back(msg.str());
        if (r.sample_count == 0) {
            r.no_data = true;
            return r;
        }
    }

    SampledSignal sampled = discretize(signal, options.fs, r.window, options.mode);
    if (!(signal.integral(r.window.lo, sampled.t_end()) > 0)) {
        r.no_data = true;
        r.warnings.push_back("no I/O inside the analysis window");
        return r;
    }

    r.sampling_error = sampling_error(signal, sampled);
    r.bad_sampling = is_bad_sampling(*r.sampling_error);
    if (r.bad_sampling) {
        std::ostringstream msg;
        msg << "sampling error " << *r.sampling_error << " exceeds " << kBadSamplingThreshold
            << " at " << options.fs << " Hz; analysis is unreliable, raise the sampling frequency";
        r.warnings.push_back(msg.str());
    }

    r.substantial = substantial_io(sampled);
    rescale(r.substantial, unit);

    if (r.sample_count >= 4) {
        const Spectrum spectrum = dft(sampled);
        r.periodicity = detect_periodicity(spectrum, options.detection);
        rescale(r.periodicity, unit);
        if (const auto f = r.periodicity.frequency()) {
            try {
                r.metrics = compute_metrics(sampled, *f);
            } catch (const InsufficientPeriodsError& e) {
                r.warnings.push_back(std::string("metrics skipped: ") + e.what());
            }
        }
        if (options.keep_signal) r.spectrum = spectrum.scaled(unit);
    }
    if (options.keep_signal) r.sampled = std::move(sampled);
    return r;
}

nlohmann::json to_json(const Candidate& c) {
    return {{"k", c.k}, {"frequency_hz", c.frequency}, {"period_s", 1.0 / c.frequency},
            {"amplitude", c.amplitude}, {"z", c.z}};
}

nlohmann::json to_json(const AnalysisResult& r) {
    using nlohmann::json;
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json candidates = json::array();
    for (const auto& c : r.periodicity.candidates.entries) candidates.push_back(to_json(c));
    json suppressed = json::array();
    for (const auto& c : r.periodicity.suppressed) suppressed.push_back(to_json(c));
    json metrics = r.metrics ? to_json(*r.metrics)
                             : json{{"threshold", r.substantial.threshold},
                                    {"r_io", r.substantial.r_io},
                                    {"b_io", opt(r.substantial.b_io)},
                                    {"sigma_vol", nullptr},
                                    {"sigma_time", nullptr},
                                    {"data_per_period", nullptr},
                                    {"score", nullptr},
                                    {"periods", nullptr}};
    return {
        {"period_s", opt(r.period())},
        {"frequency_hz", opt(r.frequency())},
        {"confidence", to_string(r.confidence())},
        {"candidates", std::move(candidates)},
        {"suppressed", std::move(suppressed)},
        {"outliers", r.periodicity.outliers},
        {"metrics", std::move(metrics)},
        {"window", {r.window.lo, r.window.hi}},
        {"fs", r.fs},
        {"samples", r.sample_count},
        {"sampling_error", opt(r.sampling_error)},
        {"bad_sampling", r.bad_sampling},
        {"no_data", r.no_data},
        {"warnings", r.warnings},
    };
}

}  // namespace ioperiod
