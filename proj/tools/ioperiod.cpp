// ioperiod: detect and predict periodic I/O phases in request traces.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ioperiod/analysis.hpp"
#include "ioperiod/error.hpp"
#include "ioperiod/online.hpp"
#include "ioperiod/spectral.hpp"
#include "ioperiod/synth.hpp"

namespace {

using namespace ioperiod;

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

struct Common {
    double freq = 10.0;
    double tolerance = 0.8;
    double z_min = 3.0;
    std::vector<double> window;
    std::string kind = "write";
    std::string format = "json";
    std::string mode = "point";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("-f,--freq", c.freq, "Sampling frequency in Hz")
        ->envname("IOPERIOD_FREQ")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--tolerance", c.tolerance, "Candidate bar as a fraction of the largest Z-score")
        ->envname("IOPERIOD_TOLERANCE")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--z-min", c.z_min, "Minimum Z-score of a candidate")
        ->envname("IOPERIOD_Z_MIN")
        ->capture_default_str();
    cmd->add_option("--window", c.window, "Analysis window: LO HI seconds")->expected(2);
    cmd->add_option("--kind", c.kind, "Request kind: read, write or both")
        ->envname("IOPERIOD_KIND")
        ->check(CLI::IsMember({"read", "write", "both"}))
        ->capture_default_str();
    cmd->add_option("--mode", c.mode, "Sampling: point or integrate")
        ->check(CLI::IsMember({"point", "integrate"}))
        ->capture_default_str();
}

AnalysisOptions analysis_options(const Common& c) {
    AnalysisOptions o;
    o.fs = c.freq;
    o.detection.tolerance = c.tolerance;
    o.detection.z_min = c.z_min;
    o.kind = parse_kind_filter(c.kind);
    o.mode = c.mode == "integrate" ? SamplingMode::Integrate : SamplingMode::Point;
    if (!c.window.empty()) o.window = TimeWindow{c.window[0], c.window[1]};
    return o;
}

void warn(const std::string& msg) { std::cerr << "ioperiod: warning: " << msg << '\n'; }

std::string opt_str(const std::optional<double>& v) {
    if (!v) return {};
    std::ostringstream s;
    s << std::setprecision(17) << *v;
    return s.str();
}

void print_text(std::ostream& out, const AnalysisResult& r) {
    out << "window        [" << r.window.lo << ", " << r.window.hi << "] s, " << r.sample_count << " samples at "
        << r.fs << " Hz\n";
    if (r.no_data) {
        out << "no data\n";
        return;
    }
    out << "confidence    " << to_string(r.confidence()) << '\n';
    if (r.period()) out << "period        " << *r.period() << " s (" << *r.frequency() << " Hz)\n";
    for (const auto& c : r.periodicity.candidates.entries)
        out << "candidate     k=" << c.k << " f=" << c.frequency << " Hz z=" << c.z << '\n';
    for (const auto& c : r.periodicity.suppressed) out << "harmonic      f=" << c.frequency << " Hz (ignored)\n";
    if (r.sampling_error) out << "sampling err  " << *r.sampling_error << '\n';
    out << "R_IO          " << r.substantial.r_io << '\n';
    if (r.substantial.b_io) out << "B_IO          " << *r.substantial.b_io << " B/s\n";
    if (r.metrics) {
        out << "sigma_vol     " << r.metrics->sigma_vol << '\n'
            << "sigma_time    " << r.metrics->sigma_time << '\n'
            << "per period    " << r.metrics->data_per_period << " B\n"
            << "score         " << r.metrics->score << '\n';
    }
}

void print_csv(std::ostream& out, const AnalysisResult& r) {
    out << "period_s,frequency_hz,confidence,r_io,b_io,sigma_vol,sigma_time,data_per_period,score,sampling_error,"
           "no_data\n";
    const auto m = r.metrics;
    out << opt_str(r.period()) << ',' << opt_str(r.frequency()) << ',' << to_string(r.confidence()) << ','
        << opt_str(r.substantial.r_io) << ',' << opt_str(r.substantial.b_io) << ','
        << opt_str(m ? std::optional(m->sigma_vol) : std::nullopt) << ','
        << opt_str(m ? std::optional(m->sigma_time) : std::nullopt) << ','
        << opt_str(m ? std::optional(m->data_per_period) : std::nullopt) << ','
        << opt_str(m ? std::optional(m->score) : std::nullopt) << ',' << opt_str(r.sampling_error) << ','
        << (r.no_data ? "true" : "false") << '\n';
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ArgumentError("cannot write '" + path + "'");
    return f;
}

// time, bandwidth, reconstruction from DC plus the dominant bin.
void write_signal_csv(std::ostream& out, const AnalysisResult& r) {
    if (!r.sampled || !r.spectrum) return;
    const auto& s = *r.sampled;
    std::vector<std::size_t> bins{0};
    if (r.periodicity.dominant) bins.push_back(r.periodicity.dominant->k);
    const auto rec = reconstruct(*r.spectrum, bins);
    out << "time,bandwidth,reconstruction\n" << std::setprecision(17);
    for (std::size_t n = 0; n < s.size(); ++n)
        out << s.time_at(n) << ',' << s.samples[n] * s.volume_unit << ',' << rec[n] << '\n';
}

int run_detect(const std::string& path, const Common& c, const std::string& spectrum_out,
               const std::string& signal_out) {
    auto opts = analysis_options(c);
    opts.keep_signal = !spectrum_out.empty() || !signal_out.empty();
    const auto trace = load_trace(path);
    const auto r = analyze(trace, opts);
    for (const auto& w : r.warnings) warn(w);
    if (c.format == "json")
        std::cout << to_json(r).dump(2) << '\n';
    else if (c.format == "csv")
        print_csv(std::cout, r);
    else
        print_text(std::cout, r);
    if (!spectrum_out.empty() && r.spectrum) {
        auto f = open_out(spectrum_out);
        write_spectrum_csv(f, *r.spectrum);
    }
    if (!signal_out.empty() && r.sampled) {
        auto f = open_out(signal_out);
        write_signal_csv(f, r);
    }
    return 0;
}

int run_spectrum(const std::string& path, const Common& c) {
    auto opts = analysis_options(c);
    opts.keep_signal = true;
    const auto r = analyze(load_trace(path), opts);
    for (const auto& w : r.warnings) warn(w);
    if (!r.spectrum) throw ArgumentError("no spectrum: the window holds no usable data");
    if (c.format == "json")
        std::cout << spectrum_to_json(*r.spectrum).dump() << '\n';
    else
        write_spectrum_csv(std::cout, *r.spectrum);
    return 0;
}

struct PredictArgs {
    double watch_interval = 1.0;
    double max_idle = 0.0;
    double appear_timeout = 10.0;
    std::vector<double> replay;
    double replay_every = 0.0;
    double fixed_window = 0.0;
    std::size_t in_flight = 0;
};

int run_predict(const std::string& path, const Common& c, const PredictArgs& a) {
    OnlineOptions online;
    online.analysis = analysis_options(c);
    if (online.analysis.window) throw ArgumentError("--window does not apply to predict; see --fixed-window");
    if (a.fixed_window > 0) online.fixed_window = a.fixed_window;
    auto emit = [](const PredictionRecord& rec) {
        for (const auto& w : rec.result.warnings) warn("prediction " + std::to_string(rec.index) + ": " + w);
        std::cout << to_json(rec).dump() << std::endl;
    };

    if (!a.replay.empty() || a.replay_every > 0) {
        const auto trace = load_trace(path);
        std::vector<double> triggers = a.replay;
        if (a.replay_every > 0)
            for (double t = a.replay_every; t <= trace.end_time(); t += a.replay_every) triggers.push_back(t);
        std::sort(triggers.begin(), triggers.end());
        for (const auto& rec : replay(trace, triggers, online, a.in_flight)) emit(rec);
        return 0;
    }

    WatchOptions w;
    w.online = online;
    auto ms = [](double s) { return std::chrono::milliseconds(static_cast<long long>(s * 1000.0)); };
    w.poll_interval = ms(a.watch_interval);
    w.appear_timeout = ms(a.appear_timeout);
    if (a.max_idle > 0) w.max_idle = ms(a.max_idle);
    TraceWatcher watcher(path, w, emit, warn);
    watcher.run();
    return 0;
}

struct GenerateArgs {
    synth::SynthConfig config;
    std::string noise = "none";
    std::string out;
    std::string truth;
    std::string templates;
};

int run_generate(GenerateArgs a) {
    a.config.noise = synth::parse_noise_level(a.noise);
    synth::PhaseLibrary custom;
    if (!a.templates.empty()) {
        custom = synth::load_phase_templates(a.templates);
        a.config.templates = &custom;
    }
    const auto g = synth::generate(a.config);
    if (a.out.empty() || a.out == "-") {
        write_trace(std::cout, g.trace);
    } else {
        auto f = open_out(a.out);
        write_trace(f, g.trace);
    }
    if (!a.truth.empty()) {
        auto f = open_out(a.truth);
        synth::write_ground_truth(f, g.truth);
    }
    return 0;
}

struct BenchArgs {
    std::string config;
    std::vector<std::string> noise;
    std::vector<double> cpu_ratio, cv, phi_ratio;
    std::optional<std::size_t> repetitions, iterations, threads;
    std::optional<std::uint64_t> seed;
    std::optional<double> freq;
    std::string out;
    std::string summary;
};

int run_bench(const BenchArgs& a) {
    synth::SweepGrid grid;
    if (!a.config.empty()) {
        std::ifstream in(a.config);
        if (!in) throw ArgumentError("cannot read config '" + a.config + "'");
        grid = synth::parse_sweep_config(in);
    }
    if (!a.noise.empty()) {
        grid.noise.clear();
        for (const auto& n : a.noise) grid.noise.push_back(synth::parse_noise_level(n));
    }
    if (!a.cpu_ratio.empty()) grid.cpu_ratio = a.cpu_ratio;
    if (!a.cv.empty()) grid.cv = a.cv;
    if (!a.phi_ratio.empty()) grid.phi_ratio = a.phi_ratio;
    if (a.repetitions) grid.repetitions = *a.repetitions;
    if (a.iterations) grid.iterations = *a.iterations;
    if (a.threads) grid.threads = *a.threads;
    if (a.seed) grid.seed = *a.seed;
    if (a.freq) grid.analysis.fs = *a.freq;

    const auto rows = synth::sweep(grid);
    if (a.out.empty() || a.out == "-") {
        synth::write_sweep_csv(std::cout, rows);
    } else {
        auto f = open_out(a.out);
        synth::write_sweep_csv(f, rows);
    }
    if (!a.summary.empty()) {
        auto f = open_out(a.summary);
        synth::write_summary_csv(f, synth::summarize(rows));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detect and predict periodic I/O phases from request traces"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ioperiod 0.1.0");

    Common common;
    std::string trace_path;
    std::string spectrum_out, signal_out;

    auto* detect = app.add_subcommand("detect", "Find the dominant I/O period of a trace");
    add_common(detect, common);
    detect->add_option("trace", trace_path, "Trace file (JSON lines)")->required()->check(CLI::ExistingFile);
    detect->add_option("--format", common.format, "Output: json, csv or text")
        ->envname("IOPERIOD_FORMAT")
        ->check(CLI::IsMember({"json", "csv", "text"}))
        ->capture_default_str();
    detect->add_option("--spectrum-out", spectrum_out, "Also write the spectrum as CSV");
    detect->add_option("--signal-out", signal_out, "Also write sampled and reconstructed bandwidth as CSV");

    auto* spectrum = app.add_subcommand("spectrum", "Export the single-sided spectrum");
    add_common(spectrum, common);
    spectrum->add_option("trace", trace_path, "Trace file")->required()->check(CLI::ExistingFile);
    std::string spectrum_format = "csv";
    spectrum->add_option("--format", spectrum_format, "Output: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    PredictArgs pa;
    auto* predict = app.add_subcommand("predict", "Analyse a growing trace after every append");
    add_common(predict, common);
    predict->add_option("trace", trace_path, "Trace file to follow")->required();
    predict->add_option("--watch-interval", pa.watch_interval, "Polling interval in seconds")
        ->envname("IOPERIOD_WATCH_INTERVAL")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    predict->add_option("--max-idle", pa.max_idle, "Stop after this many seconds without growth (0: never)");
    predict->add_option("--appear-timeout", pa.appear_timeout, "Seconds to wait for the file to appear")
        ->capture_default_str();
    predict->add_option("--fixed-window", pa.fixed_window, "Always analyse the last N seconds");
    auto* replay_opt =
        predict->add_option("--replay", pa.replay, "Replay a finished trace at these trace times")->delimiter(',');
    auto* every_opt = predict->add_option("--replay-every", pa.replay_every, "Replay with a trigger every N seconds");
    predict->add_option("--in-flight", pa.in_flight, "Replay: analyses still running at each trigger")
        ->capture_default_str();
    replay_opt->excludes(every_opt);

    GenerateArgs ga;
    auto* generate = app.add_subcommand("generate", "Write a semi-synthetic trace and its ground truth");
    generate->add_option("-o,--out", ga.out, "Trace output (default stdout)");
    generate->add_option("--truth", ga.truth, "Ground-truth JSON output");
    generate->add_option("--iterations", ga.config.iterations, "Iterations J")->capture_default_str();
    generate->add_option("--processes", ga.config.processes, "Processes P")->capture_default_str();
    generate->add_option("--mu", ga.config.mu, "Mean compute time in seconds")->capture_default_str();
    generate->add_option("--sigma", ga.config.sigma, "Compute time std in seconds")->capture_default_str();
    generate->add_option("--phi", ga.config.phi, "Mean desynchronisation in seconds")->capture_default_str();
    generate->add_option("--noise", ga.noise, "none, low or high")
        ->check(CLI::IsMember({"none", "low", "high"}))
        ->capture_default_str();
    generate->add_option("--seed", ga.config.seed, "RNG seed")->capture_default_str();
    generate->add_option("--templates", ga.templates, "Directory of phase templates (*.jsonl)")
        ->check(CLI::ExistingDirectory);

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "Sweep generator parameters and tabulate detection error");
    bench->add_option("--config", ba.config, "key = value sweep file")->check(CLI::ExistingFile);
    bench->add_option("--noise", ba.noise, "Noise levels")->delimiter(',');
    bench->add_option("--cpu-ratio", ba.cpu_ratio, "Compute time / mean phase length")->delimiter(',');
    bench->add_option("--cv", ba.cv, "sigma / mu")->delimiter(',');
    bench->add_option("--phi-ratio", ba.phi_ratio, "phi / mean phase length")->delimiter(',');
    bench->add_option("--repetitions", ba.repetitions, "Traces per combination");
    bench->add_option("--iterations", ba.iterations, "Iterations per trace");
    bench->add_option("--threads", ba.threads, "Worker threads (0: all cores)");
    bench->add_option("--seed", ba.seed, "Base seed");
    bench->add_option("-f,--freq", ba.freq, "Sampling frequency (default 1 Hz)");
    bench->add_option("-o,--out", ba.out, "Per-trace CSV (default stdout)");
    bench->add_option("--summary", ba.summary, "Per-combination summary CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (detect->parsed()) return run_detect(trace_path, common, spectrum_out, signal_out);
        if (spectrum->parsed()) {
            common.format = spectrum_format;
            return run_spectrum(trace_path, common);
        }
        if (predict->parsed()) return run_predict(trace_path, common, pa);
        if (generate->parsed()) return run_generate(ga);
        if (bench->parsed()) return run_bench(ba);
    } catch (const ArgumentError& e) {
        std::cerr << "ioperiod: " << e.what() << '\n';
        return kUsageError;
    } catch (const ConfigError& e) {
        std::cerr << "ioperiod: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "ioperiod: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kUsageError;
}
