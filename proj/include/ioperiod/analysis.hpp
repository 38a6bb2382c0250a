#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ioperiod/detection.hpp"
#include "ioperiod/metrics.hpp"
#include "ioperiod/sampling.hpp"
#include "ioperiod/spectral.hpp"
#include "ioperiod/trace.hpp"

namespace ioperiod {

struct AnalysisOptions {
    double fs = 10.0;
    DetectionOptions detection;
    /// Defaults to [0, t_max] (or [t_min, t_max] for traces with negative
    /// timestamps).
    std::optional<TimeWindow> window;
    SamplingMode mode = SamplingMode::Point;
    KindFilter kind = KindFilter::Write;
    /// Keep the spectrum and the sampled signal in the result (export).
    bool keep_signal = false;
};

struct AnalysisResult {
    TimeWindow window{0.0, 0.0};
    double fs = 0.0;
    std::size_t sample_count = 0;
    /// True when the window holds no I/O volume of the selected kind.
    bool no_data = false;
    std::optional<double> sampling_error;
    bool bad_sampling = false;
    PeriodicityResult periodicity;
    /// Threshold, R_IO and B_IO; bytes and bytes/s.
    SubstantialIo substantial;
    /// Present when a dominant frequency was found and at least two
    /// periods fit in the window.
    std::optional<MetricsReport> metrics;
    std::vector<std::string> warnings;

    std::optional<Spectrum> spectrum;       // keep_signal only, bytes
    std::optional<SampledSignal> sampled;   // keep_signal only, volume units

    std::optional<double> frequency() const { return periodicity.frequency(); }
    std::optional<double> period() const { return periodicity.period(); }
    Confidence confidence() const { return periodicity.confidence; }
};

/// Default analysis window for a trace.
TimeWindow default_window(const Trace& trace);

/// filter -> merge -> discretize -> DFT -> detection -> metrics.
/// Byte counts are divided by the trace's byte quantum before any floating
/// point work, so multiplying every byte count by a constant leaves every
/// dimensionless output bitwise unchanged.
AnalysisResult analyze(const Trace& trace, const AnalysisOptions& options = {});

nlohmann::json to_json(const Candidate& candidate);
nlohmann::json to_json(const AnalysisResult& result);

}  // namespace ioperiod
