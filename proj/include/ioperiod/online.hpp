#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ioperiod/analysis.hpp"

namespace ioperiod {

struct OnlineOptions {
    AnalysisOptions analysis;
    /// Consecutive dominant findings after which the window shrinks.
    std::size_t streak_threshold = 3;
    /// Shrunk window length in periods of the last dominant frequency.
    double window_periods = 3.0;
    /// Always analyse the last `fixed_window` seconds instead.
    std::optional<double> fixed_window;
};

struct PredictionRecord {
    std::size_t index = 0;
    double trigger_time = 0.0;
    TimeWindow window{0.0, 0.0};
    AnalysisResult result;
    /// Consecutive analyses, up to and including this one, that found a
    /// dominant frequency (High or Moderate).
    std::size_t dominant_streak = 0;
};

/// Window for an analysis triggered at `now`, given the records whose
/// analyses had completed by then (in trigger order).
TimeWindow select_window(std::span<const PredictionRecord> completed, double now, const OnlineOptions& options);

/// Streak value for a new record following `previous` (nullptr if none).
std::size_t next_streak(const PredictionRecord* previous, const AnalysisResult& result);

/// Analyses `snapshot` on the window chosen from `completed`. The streak is
/// continued from the last completed record.
PredictionRecord on_new_data(std::span<const PredictionRecord> completed, const Trace& snapshot, double now,
                             const OnlineOptions& options = {});

/// Replays `trace` as if it were tailed: trigger i sees every request that
/// completed by `triggers[i]`. `in_flight` analyses started before trigger i
/// are still running when it fires, so their findings are not yet usable.
/// Streaks are assigned in trigger order over the full log.
std::vector<PredictionRecord> replay(const Trace& trace, std::span<const double> triggers,
                                     const OnlineOptions& options = {}, std::size_t in_flight = 0);

nlohmann::json to_json(const PredictionRecord& record);

struct WatchOptions {
    OnlineOptions online;
    std::chrono::milliseconds poll_interval{1000};
    /// Give up waiting for the file to appear after this long.
    std::chrono::milliseconds appear_timeout{10000};
    /// Stop after this long without growth; runs until stopped if unset.
    std::optional<std::chrono::milliseconds> max_idle;
    /// Analyses allowed to run concurrently.
    std::size_t max_in_flight = 4;
};

/// Polls a growing trace file and analyses each append. Records are
/// published through `sink` in trigger order, whatever order the analyses
/// finish in.
class TraceWatcher {
public:
    using Sink = std::function<void(const PredictionRecord&)>;
    using WarningSink = std::function<void(const std::string&)>;

    TraceWatcher(std::filesystem::path path, WatchOptions options, Sink sink, WarningSink warn = {});

    /// Blocks until idle timeout or stop(). Throws Error when the file is
    /// missing after the appear timeout or cannot be read.
    void run();
    void stop() noexcept { stop_.store(true); }

    const std::vector<PredictionRecord>& records() const noexcept { return log_; }

private:
    std::filesystem::path path_;
    WatchOptions options_;
    Sink sink_;
    WarningSink warn_;
    std::atomic<bool> stop_{false};
    std::vector<PredictionRecord> log_;
};

}  // namespace ioperiod
