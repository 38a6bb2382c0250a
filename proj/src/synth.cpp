#include "ioperiod/synth.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "ioperiod/error.hpp"

namespace ioperiod::synth {

std::uint64_t PhaseTemplate::volume() const noexcept {
    std::uint64_t v = 0;
    for (const auto& r : requests) v += r.bytes;
    return v;
}

PhaseTemplate PhaseTemplate::from_trace(const Trace& trace) {
    if (trace.empty()) throw ConfigError("phase template has no requests");
    PhaseTemplate t;
    const double origin = trace.start_time();
    std::uint32_t max_rank = 0;
    for (const auto& r : trace.requests()) max_rank = std::max(max_rank, r.rank);
    t.process_end.assign(max_rank + 1, 0.0);
    t.requests.reserve(trace.size());
    for (auto r : trace.requests()) {
        r.start -= origin;
        r.end -= origin;
        t.process_end[r.rank] = std::max(t.process_end[r.rank], r.end);
        t.requests.push_back(r);
    }
    t.duration = *std::max_element(t.process_end.begin(), t.process_end.end());
    return t;
}

namespace {

PhaseLibrary build_bundled() {
    std::mt19937_64 rng(0x10d1a7e5ULL);
    std::exponential_distribution<double> tail(1.0 / 0.6);
    std::uniform_real_distribution<double> early(0.0, 0.05);
    std::uniform_real_distribution<double> jitter(0.7, 1.3);

    PhaseLibrary lib(kBundledTemplates);
    std::vector<double> weights(kBundledRequests);
    for (auto& t : lib) {
        double d;
        do d = kMinPhase + tail(rng);
        while (d > kMaxPhase);
        t.duration = d;
        t.process_end.resize(kBundledProcesses);
        t.requests.reserve(kBundledProcesses * kBundledRequests);
        for (std::size_t p = 0; p < kBundledProcesses; ++p) {
            const double end = p == 0 ? d : d * (1.0 - early(rng));
            t.process_end[p] = end;
            for (auto& w : weights) w = jitter(rng);
            const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
            double acc = 0.0;
            double prev = 0.0;
            for (std::size_t i = 0; i < kBundledRequests; ++i) {
                acc += weights[i];
                const double next = i + 1 == kBundledRequests ? end : end * (acc / total);
                t.requests.push_back({static_cast<std::uint32_t>(p), prev, next, kBundledRequestBytes, IoKind::Write});
                prev = next;
            }
        }
    }
    return lib;
}

double draw_compute(std::mt19937_64& rng, double mu, double sigma) {
    if (sigma == 0.0) return mu;
    std::normal_distribution<double> normal(mu, sigma);
    double t;
    do t = normal(rng);
    while (t <= 0.0);
    return t;
}

std::optional<double> median(std::vector<double> v) {
    if (v.empty()) return std::nullopt;
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
    if (v.size() % 2) return v[m];
    const double hi = v[m];
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m));
    return 0.5 * (lo + hi);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const auto item = trim(s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

template <class T>
T parse_number(const std::string& text, std::size_t line, std::string_view key) {
    T v{};
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size())
        throw ConfigError("line " + std::to_string(line) + ": bad value '" + text + "' for " + std::string(key));
    return v;
}

std::string fmt(double v) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

}  // namespace

const PhaseLibrary& bundled_phase_templates() {
    static const PhaseLibrary lib = build_bundled();
    return lib;
}

PhaseLibrary load_phase_templates(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("no *.jsonl templates in " + dir.string());
    PhaseLibrary lib;
    for (const auto& f : files) lib.push_back(PhaseTemplate::from_trace(load_trace(f)));
    return lib;
}

double mean_duration(const PhaseLibrary& library) {
    if (library.empty()) return 0.0;
    double s = 0.0;
    for (const auto& t : library) s += t.duration;
    return s / static_cast<double>(library.size());
}

std::string_view to_string(NoiseLevel level) noexcept {
    switch (level) {
        case NoiseLevel::None: return "none";
        case NoiseLevel::Low: return "low";
        case NoiseLevel::High: return "high";
    }
    return "none";
}

NoiseLevel parse_noise_level(std::string_view text) {
    if (text == "none") return NoiseLevel::None;
    if (text == "low") return NoiseLevel::Low;
    if (text == "high") return NoiseLevel::High;
    throw ArgumentError("unknown noise level '" + std::string(text) + "' (none, low, high)");
}

double noise_bandwidth(NoiseLevel level) noexcept {
    switch (level) {
        case NoiseLevel::None: return 0.0;
        case NoiseLevel::Low: return 500e6;
        case NoiseLevel::High: return 1e9;
    }
    return 0.0;
}

Generated generate(const SynthConfig& c) {
    const PhaseLibrary& lib = c.templates ? *c.templates : bundled_phase_templates();
    if (c.iterations < 1) throw ConfigError("iterations must be at least 1");
    if (c.processes < 1) throw ConfigError("processes must be at least 1");
    if (!(c.mu > 0)) throw ConfigError("mu must be positive");
    if (!(c.sigma >= 0)) throw ConfigError("sigma must be non-negative");
    if (!(c.phi >= 0)) throw ConfigError("phi must be non-negative");
    if (lib.empty()) throw ConfigError("phase template library is empty");
    for (std::size_t i = 0; i < lib.size(); ++i)
        if (lib[i].processes() < c.processes)
            throw ConfigError("template " + std::to_string(i) + " has " + std::to_string(lib[i].processes()) +
                              " processes, need " + std::to_string(c.processes));

    std::mt19937_64 rng(c.seed);
    std::uniform_int_distribution<std::size_t> pick(0, lib.size() - 1);
    std::exponential_distribution<double> desync(c.phi > 0 ? 1.0 / c.phi : 1.0);

    Generated g;
    GroundTruth& truth = g.truth;
    std::vector<IoRequest> requests;
    std::size_t per_phase = 0;
    for (const auto& t : lib) per_phase = std::max(per_phase, t.requests.size());
    requests.reserve(per_phase * c.iterations);

    std::vector<double> delta(c.processes, 0.0);
    double t = 0.0;
    double busy = 0.0;
    for (std::size_t j = 0; j < c.iterations; ++j) {
        const double cpu = draw_compute(rng, c.mu, c.sigma);
        const double start = t + cpu;
        const std::size_t id = pick(rng);
        const PhaseTemplate& tpl = lib[id];
        for (std::size_t k = 1; k < c.processes; ++k) delta[k] = c.phi > 0 ? desync(rng) : 0.0;

        double end = start;
        for (std::size_t k = 0; k < c.processes; ++k) end = std::max(end, start + delta[k] + tpl.process_end[k]);
        for (const auto& r : tpl.requests) {
            if (r.rank >= c.processes) continue;
            const double shift = start + delta[r.rank];
            requests.push_back({r.rank, shift + r.start, shift + r.end, r.bytes, r.kind});
            truth.app_volume += r.bytes;
        }
        truth.compute_times.push_back(cpu);
        truth.iteration_starts.push_back(start);
        truth.phase_bounds.push_back({start, end});
        truth.template_ids.push_back(id);
        busy += end - start;
        t = end;
    }
    truth.trace_end = t;
    truth.r_io = busy / t;
    if (c.iterations > 1)
        truth.lambda_avg = (truth.iteration_starts.back() - truth.iteration_starts.front()) /
                           static_cast<double>(c.iterations - 1);

    if (c.noise != NoiseLevel::None) {
        const double rate = noise_bandwidth(c.noise);
        const double tile = kNoisePeriod * static_cast<double>(kNoisePeriodsPerTrace);
        const double burst = 0.5 * kNoisePeriod;
        std::uniform_real_distribution<double> offset(0.0, tile);
        const auto rank = static_cast<std::uint32_t>(c.processes);
        for (double base = -offset(rng); base < t; base += tile) {
            for (std::size_t p = 0; p < kNoisePeriodsPerTrace; ++p) {
                const double lo = std::max(0.0, base + static_cast<double>(p) * kNoisePeriod);
                const double hi = std::min(t, base + static_cast<double>(p) * kNoisePeriod + burst);
                if (!(hi > lo)) continue;
                const auto bytes = static_cast<std::uint64_t>(std::llround(rate * (hi - lo)));
                if (bytes == 0) continue;
                requests.push_back({rank, lo, hi, bytes, IoKind::Write});
                truth.noise_volume += bytes;
            }
        }
    }

    Metadata meta{{"origin", "synthetic"},
                  {"processes", std::to_string(c.processes)},
                  {"iterations", std::to_string(c.iterations)},
                  {"seed", std::to_string(c.seed)}};
    g.trace = Trace(std::move(requests), std::move(meta));
    return g;
}

std::optional<double> detection_error(std::optional<double> lambda_detected, const GroundTruth& truth) {
    if (!(truth.lambda_avg > 0)) throw ArgumentError("ground truth has no mean iteration length");
    if (!lambda_detected) return std::nullopt;
    return std::abs(*lambda_detected - truth.lambda_avg) / truth.lambda_avg;
}

SweepGrid parse_sweep_config(std::istream& in) {
    SweepGrid g;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view s(raw);
        if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        const std::string text = trim(s);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
        const std::string key = trim(std::string_view(text).substr(0, eq));
        const auto values = split_list(std::string_view(text).substr(eq + 1));
        if (values.empty()) throw ConfigError("line " + std::to_string(line) + ": no value for " + key);
        auto doubles = [&] {
            std::vector<double> v;
            for (const auto& x : values) v.push_back(parse_number<double>(x, line, key));
            return v;
        };
        auto single = [&]<class T>(T) {
            if (values.size() != 1) throw ConfigError("line " + std::to_string(line) + ": " + key + " takes one value");
            return parse_number<T>(values.front(), line, key);
        };
        if (key == "noise") {
            g.noise.clear();
            for (const auto& x : values) g.noise.push_back(parse_noise_level(x));
        } else if (key == "cpu_ratio") {
            g.cpu_ratio = doubles();
        } else if (key == "cv") {
            g.cv = doubles();
        } else if (key == "phi_ratio") {
            g.phi_ratio = doubles();
        } else if (key == "repetitions") {
            g.repetitions = single(std::size_t{});
        } else if (key == "iterations") {
            g.iterations = single(std::size_t{});
        } else if (key == "processes") {
            g.processes = single(std::size_t{});
        } else if (key == "seed") {
            g.seed = single(std::uint64_t{});
        } else if (key == "fs") {
            g.analysis.fs = single(double{});
        } else if (key == "threads") {
            g.threads = single(std::size_t{});
        } else {
            throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
        }
    }
    return g;
}

std::uint64_t derive_seed(std::uint64_t seed, std::size_t combination, std::size_t repetition) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(combination), static_cast<std::uint32_t>(repetition)};
    std::mt19937_64 rng(seq);
    return rng();
}

std::vector<SweepRow> sweep(const SweepGrid& grid, const PhaseLibrary& library) {
    const double dbar = mean_duration(library);
    const std::size_t combos = grid.combinations();
    std::vector<SweepRow> rows(combos * grid.repetitions);

    auto run_one = [&](std::size_t i) {
        const std::size_t combo = i / grid.repetitions;
        const std::size_t rep = i % grid.repetitions;
        std::size_t rest = combo;
        const std::size_t iphi = rest % grid.phi_ratio.size();
        rest /= grid.phi_ratio.size();
        const std::size_t icv = rest % grid.cv.size();
        rest /= grid.cv.size();
        const std::size_t icpu = rest % grid.cpu_ratio.size();
        rest /= grid.cpu_ratio.size();
        const std::size_t inoise = rest;

        SweepRow& row = rows[i];
        row.combination = combo;
        row.repetition = rep;
        row.noise = grid.noise[inoise];
        row.cpu_ratio = grid.cpu_ratio[icpu];
        row.cv = grid.cv[icv];
        row.phi_ratio = grid.phi_ratio[iphi];
        row.seed = derive_seed(grid.seed, combo, rep);

        SynthConfig c;
        c.iterations = grid.iterations;
        c.processes = grid.processes;
        c.mu = row.cpu_ratio * dbar;
        c.sigma = row.cv * c.mu;
        c.phi = row.phi_ratio * dbar;
        c.noise = row.noise;
        c.seed = row.seed;
        c.templates = &library;
        const auto g = generate(c);
        const auto r = analyze(g.trace, grid.analysis);

        row.lambda_avg = g.truth.lambda_avg;
        row.lambda_detected = r.period();
        row.error = g.truth.lambda_avg > 0 ? detection_error(row.lambda_detected, g.truth) : std::nullopt;
        row.confidence = r.confidence();
        if (r.metrics) {
            row.sigma_vol = r.metrics->sigma_vol;
            row.sigma_time = r.metrics->sigma_time;
            row.score = r.metrics->score;
        }
        row.r_io = r.substantial.r_io;
        row.r_io_truth = g.truth.r_io;
    };

    std::size_t threads = grid.threads ? grid.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, rows.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) run_one(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < rows.size();) {
                try {
                    run_one(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next.store(rows.size());
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return rows;
}

std::vector<CellSummary> summarize(const std::vector<SweepRow>& rows) {
    std::vector<CellSummary> cells;
    std::size_t i = 0;
    while (i < rows.size()) {
        CellSummary c;
        const auto& first = rows[i];
        c.combination = first.combination;
        c.noise = first.noise;
        c.cpu_ratio = first.cpu_ratio;
        c.cv = first.cv;
        c.phi_ratio = first.phi_ratio;
        std::vector<double> errors, scores;
        std::size_t non_high = 0;
        for (; i < rows.size() && rows[i].combination == c.combination; ++i) {
            const auto& r = rows[i];
            ++c.traces;
            if (r.error) {
                ++c.detections;
                errors.push_back(*r.error);
            }
            if (r.confidence != Confidence::High) ++non_high;
            if (r.score) scores.push_back(*r.score);
            if (r.r_io_truth > 0)
                c.max_r_io_deviation = std::max(c.max_r_io_deviation, std::abs(r.r_io - r.r_io_truth) / r.r_io_truth);
        }
        c.median_error = median(errors);
        if (!errors.empty()) c.max_error = *std::max_element(errors.begin(), errors.end());
        c.non_high_share = static_cast<double>(non_high) / static_cast<double>(c.traces);
        c.median_score = median(scores);
        cells.push_back(c);
    }
    return cells;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "noise,cpu_ratio,cv,phi_ratio,repetition,seed,lambda_avg,lambda_detected,error,confidence,"
           "sigma_vol,sigma_time,score,r_io,r_io_truth\n";
    for (const auto& r : rows) {
        out << to_string(r.noise) << ',' << fmt(r.cpu_ratio) << ',' << fmt(r.cv) << ',' << fmt(r.phi_ratio) << ','
            << r.repetition << ',' << r.seed << ',' << fmt(r.lambda_avg) << ',' << fmt(r.lambda_detected) << ','
            << fmt(r.error) << ',' << to_string(r.confidence) << ',' << fmt(r.sigma_vol) << ','
            << fmt(r.sigma_time) << ',' << fmt(r.score) << ',' << fmt(r.r_io) << ',' << fmt(r.r_io_truth) << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
    out << "noise,cpu_ratio,cv,phi_ratio,traces,detections,median_error,max_error,non_high_share,median_score,"
           "max_r_io_deviation\n";
    for (const auto& c : cells) {
        out << to_string(c.noise) << ',' << fmt(c.cpu_ratio) << ',' << fmt(c.cv) << ',' << fmt(c.phi_ratio) << ','
            << c.traces << ',' << c.detections << ',' << fmt(c.median_error) << ',' << fmt(c.max_error) << ','
            << fmt(c.non_high_share) << ',' << fmt(c.median_score) << ',' << fmt(c.max_r_io_deviation) << '\n';
    }
}

void write_ground_truth(std::ostream& out, const GroundTruth& t) {
    nlohmann::json bounds = nlohmann::json::array();
    for (const auto& b : t.phase_bounds) bounds.push_back({b.lo, b.hi});
    nlohmann::json j{{"iteration_starts", t.iteration_starts},
                     {"phase_bounds", bounds},
                     {"compute_times", t.compute_times},
                     {"template_ids", t.template_ids},
                     {"lambda_avg", t.lambda_avg},
                     {"trace_end", t.trace_end},
                     {"r_io", t.r_io},
                     {"app_volume", t.app_volume},
                     {"noise_volume", t.noise_volume}};
    out << j.dump() << '\n';
}

}  // namespace ioperiod::synth
