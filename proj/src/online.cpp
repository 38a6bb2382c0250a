#include "ioperiod/online.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <future>
#include <thread>

#include "ioperiod/error.hpp"

namespace ioperiod {

namespace {

bool is_dominant(const AnalysisResult& r) {
    return r.confidence() == Confidence::High || r.confidence() == Confidence::Moderate;
}

}  // namespace

TimeWindow select_window(std::span<const PredictionRecord> completed, double now, const OnlineOptions& options) {
    double lo = 0.0;
    if (options.fixed_window) {
        lo = now - *options.fixed_window;
    } else if (!completed.empty()) {
        const auto& last = completed.back();
        if (last.dominant_streak >= options.streak_threshold && last.result.period())
            lo = now - options.window_periods * *last.result.period();
    }
    // Never fewer than three bins, whatever period the last analysis found.
    lo = std::min(lo, now - 3.0 / options.analysis.fs);
    return {std::max(0.0, lo), now};
}

std::size_t next_streak(const PredictionRecord* previous, const AnalysisResult& result) {
    if (!is_dominant(result)) return 0;
    return previous ? previous->dominant_streak + 1 : 1;
}

PredictionRecord on_new_data(std::span<const PredictionRecord> completed, const Trace& snapshot, double now,
                             const OnlineOptions& options) {
    PredictionRecord rec;
    rec.index = completed.empty() ? 0 : completed.back().index + 1;
    rec.trigger_time = now;
    rec.window = select_window(completed, now, options);
    AnalysisOptions opts = options.analysis;
    opts.window = rec.window;
    rec.result = analyze(snapshot, opts);
    rec.dominant_streak = next_streak(completed.empty() ? nullptr : &completed.back(), rec.result);
    return rec;
}

std::vector<PredictionRecord> replay(const Trace& trace, std::span<const double> triggers,
                                     const OnlineOptions& options, std::size_t in_flight) {
    if (!std::is_sorted(triggers.begin(), triggers.end())) throw ArgumentError("trigger times must be ascending");
    std::vector<PredictionRecord> log;
    log.reserve(triggers.size());
    for (std::size_t i = 0; i < triggers.size(); ++i) {
        const std::size_t usable = i > in_flight ? i - in_flight : 0;
        auto rec = on_new_data(std::span<const PredictionRecord>(log.data(), usable), trace.completed_by(triggers[i]),
                               triggers[i], options);
        rec.index = i;
        rec.dominant_streak = next_streak(log.empty() ? nullptr : &log.back(), rec.result);
        log.push_back(std::move(rec));
    }
    return log;
}

nlohmann::json to_json(const PredictionRecord& rec) {
    auto j = to_json(rec.result);
    j["index"] = rec.index;
    j["trigger_time"] = rec.trigger_time;
    j["dominant_streak"] = rec.dominant_streak;
    return j;
}

TraceWatcher::TraceWatcher(std::filesystem::path path, WatchOptions options, Sink sink, WarningSink warn)
    : path_(std::move(path)), options_(std::move(options)), sink_(std::move(sink)), warn_(std::move(warn)) {
    if (options_.max_in_flight == 0) options_.max_in_flight = 1;
}

void TraceWatcher::run() {
    using clock = std::chrono::steady_clock;
    namespace fs = std::filesystem;

    const auto started = clock::now();
    while (!fs::exists(path_)) {
        if (stop_.load()) return;
        if (clock::now() - started > options_.appear_timeout)
            throw Error("trace file " + path_.string() + " did not appear");
        std::this_thread::sleep_for(options_.poll_interval);
    }

    struct Pending {
        double now;
        std::future<PredictionRecord> future;
    };
    std::deque<Pending> pending;
    std::vector<IoRequest> requests;
    Metadata metadata;
    std::uintmax_t consumed = 0;
    std::size_t lines = 0;
    std::size_t next_index = 0;
    auto last_growth = clock::now();

    auto publish = [&](bool wait) {
        while (!pending.empty()) {
            auto& front = pending.front().future;
            if (!wait && front.wait_for(std::chrono::seconds(0)) != std::future_status::ready) break;
            auto rec = front.get();
            pending.pop_front();
            rec.dominant_streak = next_streak(log_.empty() ? nullptr : &log_.back(), rec.result);
            log_.push_back(rec);
            if (sink_) sink_(log_.back());
        }
    };

    for (;;) {
        publish(false);

        std::error_code ec;
        const auto size = fs::file_size(path_, ec);
        if (ec) throw Error("cannot stat trace file " + path_.string() + ": " + ec.message());

        if (size < consumed) {
            if (warn_) warn_("trace file " + path_.string() + " shrank; restarting analysis");
            for (auto& p : pending) p.future.wait();
            pending.clear();
            log_.clear();
            requests.clear();
            metadata.clear();
            consumed = 0;
            lines = 0;
            next_index = 0;
        }

        bool grew = false;
        if (size > consumed) {
            std::ifstream in(path_, std::ios::binary);
            if (!in) throw Error("cannot read trace file " + path_.string());
            in.seekg(static_cast<std::streamoff>(consumed));
            std::string chunk(static_cast<std::size_t>(size - consumed), '\0');
            in.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
            chunk.resize(static_cast<std::size_t>(in.gcount()));
            const auto cut = chunk.rfind('\n');
            if (cut != std::string::npos) {
                chunk.resize(cut + 1);
                ParseOptions po;
                po.tail = true;
                po.first_line = lines + 1;
                const Trace part = parse_trace(std::string_view(chunk), po);
                requests.insert(requests.end(), part.requests().begin(), part.requests().end());
                for (const auto& [k, v] : part.metadata()) metadata.emplace(k, v);
                lines += static_cast<std::size_t>(std::count(chunk.begin(), chunk.end(), '\n'));
                consumed += cut + 1;
                grew = !part.empty();
            }
        }

        if (grew) {
            last_growth = clock::now();
            while (pending.size() >= options_.max_in_flight) publish(true);
            auto snapshot = std::make_shared<const Trace>(requests, metadata);
            const double now = snapshot->end_time();
            std::vector<PredictionRecord> completed = log_;
            const std::size_t index = next_index++;
            auto opts = options_.online;
            pending.push_back({now, std::async(std::launch::async, [snapshot, now, index, opts,
                                                                     completed = std::move(completed)] {
                                   auto rec = on_new_data(completed, *snapshot, now, opts);
                                   rec.index = index;
                                   return rec;
                               })});
        }

        if (stop_.load()) break;
        if (options_.max_idle && clock::now() - last_growth > *options_.max_idle) break;
        std::this_thread::sleep_for(options_.poll_interval);
    }
    publish(true);
}

}  // namespace ioperiod
