#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include <doctest.h>

#include "ioperiod/error.hpp"
#include "ioperiod/online.hpp"

using namespace ioperiod;

namespace {

PredictionRecord finding(double period, std::size_t streak) {
    PredictionRecord r;
    r.dominant_streak = streak;
    r.result.periodicity.confidence = Confidence::High;
    r.result.periodicity.dominant = Candidate{1, 1.0 / period, 1.0, 5.0};
    return r;
}

Trace bursts(double period, double width, double until, double offset = 1.0) {
    std::vector<IoRequest> r;
    for (double s = offset; s + width <= until; s += period)
        for (std::uint32_t p = 0; p < 4; ++p) r.push_back({p, s, s + width, 1 << 20, IoKind::Write});
    return Trace(std::move(r));
}

std::filesystem::path temp_file(const char* name) {
    auto p = std::filesystem::temp_directory_path() /
             (std::string(name) + "_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    std::filesystem::remove(p);
    return p;
}

}  // namespace

TEST_SUITE("online") {

TEST_CASE("window shrinks after three findings") {
    OnlineOptions o;
    std::vector<PredictionRecord> h{finding(9.0, 1), finding(8.5, 2), finding(8.1, 3)};
    const auto w = select_window(h, 47.4, o);
    CHECK(w.hi == 47.4);
    CHECK(w.lo == doctest::Approx(23.1));
    CHECK(w.lo == 47.4 - 3.0 * (1.0 / (1.0 / 8.1)));

    h.back().dominant_streak = 2;
    CHECK(select_window(h, 47.4, o).lo == 0.0);
    CHECK(select_window({}, 12.0, o).lo == 0.0);

    std::vector<PredictionRecord> late{finding(8.0, 7)};
    CHECK(select_window(late, 71.1, o).lo == doctest::Approx(47.1));
}

TEST_CASE("window clamps at zero and keeps three bins") {
    OnlineOptions o;
    std::vector<PredictionRecord> h{finding(20.0, 3)};
    CHECK(select_window(h, 30.0, o).lo == 0.0);
    h = {finding(0.001, 4)};
    const auto w = select_window(h, 30.0, o);
    CHECK(w.hi - w.lo == doctest::Approx(3.0 / o.analysis.fs));
}

TEST_CASE("fixed window") {
    OnlineOptions o;
    o.fixed_window = 15.0;
    CHECK(select_window({}, 40.0, o).lo == 25.0);
    CHECK(select_window({}, 10.0, o).lo == 0.0);
}

TEST_CASE("streaks") {
    AnalysisResult dom;
    dom.periodicity.confidence = Confidence::Moderate;
    AnalysisResult low;
    low.periodicity.confidence = Confidence::Low;
    CHECK(next_streak(nullptr, dom) == 1);
    const auto prev = finding(3.0, 4);
    CHECK(next_streak(&prev, dom) == 5);
    CHECK(next_streak(&prev, low) == 0);
}

TEST_CASE("on_new_data without I/O") {
    const auto rec = on_new_data({}, Trace(), 10.0);
    CHECK(rec.result.no_data);
    CHECK(rec.result.confidence() == Confidence::NoCandidate);
    CHECK(rec.dominant_streak == 0);
}

TEST_CASE("replay adapts the window and is deterministic") {
    const auto trace = bursts(8.0, 1.5, 120.0);
    const std::vector<double> triggers{20.0, 30.0, 40.0, 50.0, 60.0, 70.0};
    const auto a = replay(trace, triggers);
    const auto b = replay(trace, triggers);
    REQUIRE(a.size() == triggers.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].index == i);
        CHECK(a[i].trigger_time == triggers[i]);
        CHECK(a[i].window.lo == b[i].window.lo);
        CHECK(a[i].dominant_streak == b[i].dominant_streak);
        CHECK(to_json(a[i]).dump() == to_json(b[i]).dump());
    }
    std::size_t shrunk = 0;
    for (std::size_t i = 1; i < a.size(); ++i) {
        const auto& prev = a[i - 1];
        if (prev.dominant_streak >= 3) {
            ++shrunk;
            CHECK(a[i].window.lo == doctest::Approx(std::max(0.0, a[i].trigger_time - 3.0 * *prev.result.period())));
        } else {
            CHECK(a[i].window.lo == 0.0);
        }
    }
    CHECK(shrunk > 0);
}

TEST_CASE("in-flight analyses are not yet usable") {
    const auto trace = bursts(8.0, 1.5, 120.0);
    const std::vector<double> triggers{20.0, 30.0, 40.0, 50.0, 60.0, 70.0};
    const auto now = replay(trace, triggers, {}, 0);
    const auto lag = replay(trace, triggers, {}, 1);
    // Streaks are assigned over the full log either way.
    for (std::size_t i = 0; i < now.size(); ++i) CHECK(now[i].dominant_streak == lag[i].dominant_streak);
    // With one analysis in flight, trigger i sees the log up to i - 2.
    for (std::size_t i = 2; i < lag.size(); ++i) {
        const auto& usable = lag[i - 2];
        const double expect =
            usable.dominant_streak >= 3 ? std::max(0.0, lag[i].trigger_time - 3.0 * *usable.result.period()) : 0.0;
        CHECK(lag[i].window.lo == doctest::Approx(expect));
    }
    CHECK_THROWS_AS(replay(trace, std::vector<double>{5.0, 1.0}), ArgumentError);
}

TEST_CASE("watcher follows appends and handles truncation") {
    const auto path = temp_file("ioperiod_watch");
    const auto trace = bursts(5.0, 1.0, 60.0);
    const auto reqs = trace.requests();
    std::vector<PredictionRecord> seen;
    std::vector<std::string> warnings;

    WatchOptions w;
    w.poll_interval = std::chrono::milliseconds(20);
    w.max_idle = std::chrono::milliseconds(600);
    w.online.analysis.fs = 10.0;
    TraceWatcher watcher(path, w, [&](const PredictionRecord& r) { seen.push_back(r); },
                         [&](const std::string& m) { warnings.push_back(m); });
    std::thread runner([&] { watcher.run(); });

    auto write_range = [&](std::size_t lo, std::size_t hi, bool append, bool torn) {
        std::ofstream f(path, append ? std::ios::app : std::ios::trunc);
        for (std::size_t i = lo; i < hi; ++i) f << format_request(reqs[i]) << '\n';
        if (torn) f << "{\"rank\":0,\"sta";
    };
    write_range(0, reqs.size() / 3, false, false);
    std::this_thread::sleep_for(std::chrono::milliseconds(150));
    write_range(reqs.size() / 3, 2 * reqs.size() / 3, true, true);
    std::this_thread::sleep_for(std::chrono::milliseconds(150));
    {
        std::ofstream f(path, std::ios::app);
        f << "rt\":0,\"end\":0.5,\"bytes\":0,\"kind\":\"write\"}\n";
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(150));
    write_range(0, 8, false, false);
    runner.join();

    REQUIRE(seen.size() >= 3);
    for (std::size_t i = 1; i < seen.size(); ++i)
        if (seen[i].index != 0) CHECK(seen[i].trigger_time >= seen[i - 1].trigger_time);
    CHECK(seen[0].index == 0);
    CHECK_FALSE(warnings.empty());
    CHECK(watcher.records().back().trigger_time == doctest::Approx(reqs[7].end));
    std::filesystem::remove(path);
}

TEST_CASE("watcher gives up on a missing file") {
    WatchOptions w;
    w.poll_interval = std::chrono::milliseconds(10);
    w.appear_timeout = std::chrono::milliseconds(50);
    TraceWatcher watcher(temp_file("ioperiod_missing"), w, [](const PredictionRecord&) {});
    CHECK_THROWS_AS(watcher.run(), Error);
}

TEST_CASE("record json") {
    const auto rec = on_new_data({}, bursts(4.0, 1.0, 40.0), 40.0);
    const auto j = to_json(rec);
    CHECK(j.contains("trigger_time"));
    CHECK(j.contains("dominant_streak"));
    CHECK(j["window"][1] == 40.0);
}

}
