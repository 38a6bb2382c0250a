#include "ioperiod/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "ioperiod/error.hpp"
#include "ioperiod/kernels.hpp"

namespace ioperiod {

namespace {

// Values within this relative distance of an integer are taken as that
// integer; keeps 50-bin periods at 50 bins despite 5 Hz / 0.1 Hz rounding.
double snap(double v) {
    const double r = std::round(v);
    return std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v)) ? r : v;
}

}  // namespace

SubstantialIo substantial_io(const SampledSignal& sampled) {
    SubstantialIo s;
    const std::size_t n = sampled.size();
    s.length = static_cast<double>(n) / sampled.fs;
    if (n == 0) return s;
    const double total = kernels::sum(sampled.samples);
    s.total_volume = total / sampled.fs;
    s.threshold = total / static_cast<double>(n);
    if (!(total > 0)) return s;
    const auto above = kernels::sum_above(sampled.samples, s.threshold);
    s.substantial_bins = above.count;
    s.r_io = static_cast<double>(above.count) / static_cast<double>(n);
    s.substantial_volume = above.sum / sampled.fs;
    if (above.count > 0) s.b_io = above.sum / static_cast<double>(above.count);
    return s;
}

PeriodPartition partition_periods(const SampledSignal& sampled, double f_d) {
    if (!(f_d > 0)) throw ArgumentError("dominant frequency must be positive");
    const double bins_per_period = snap(sampled.fs / f_d);
    const double periods = std::floor(snap(static_cast<double>(sampled.size()) / bins_per_period));
    if (periods < 2)
        throw InsufficientPeriodsError("only " + std::to_string(static_cast<long long>(periods)) +
                                       " complete period(s) in the window; need at least 2");
    PeriodPartition p;
    p.periods = static_cast<std::size_t>(periods);
    p.bounds.resize(p.periods + 1);
    for (std::size_t i = 0; i <= p.periods; ++i)
        p.bounds[i] = static_cast<std::size_t>(std::ceil(snap(static_cast<double>(i) * bins_per_period)));
    p.bounds.back() = std::min(p.bounds.back(), sampled.size());
    return p;
}

double sigma_vol(const SampledSignal& sampled, double f_d) {
    const auto part = partition_periods(sampled, f_d);
    const std::span<const double> x(sampled.samples);
    std::vector<double> volumes(part.periods);
    for (std::size_t i = 0; i < part.periods; ++i)
        volumes[i] = kernels::sum(x.subspan(part.begin(i), part.end(i) - part.begin(i)));
    const double vmax = *std::max_element(volumes.begin(), volumes.end());
    if (!(vmax > 0)) return 0.0;
    for (auto& v : volumes) v /= vmax;
    return kernels::mean_std(volumes).stddev;
}

double sigma_time(const SampledSignal& sampled, double f_d, double threshold) {
    const auto part = partition_periods(sampled, f_d);
    const std::span<const double> x(sampled.samples);
    std::vector<double> fractions(part.periods);
    std::size_t busy = 0;
    for (std::size_t i = 0; i < part.periods; ++i) {
        const std::size_t len = part.end(i) - part.begin(i);
        const auto above = kernels::sum_above(x.subspan(part.begin(i), len), threshold);
        busy += above.count;
        fractions[i] = len ? static_cast<double>(above.count) / static_cast<double>(len) : 0.0;
    }
    const double r_io = static_cast<double>(busy) / static_cast<double>(part.bounds.back());
    double ss = 0.0;
    for (double f : fractions) ss += (f - r_io) * (f - r_io);
    return std::min(0.5, std::sqrt(ss / static_cast<double>(part.periods)));
}

double data_per_period(double substantial_volume, double length, double f_d) {
    if (!(f_d > 0) || !(length > 0)) throw ArgumentError("data per period needs f_d > 0 and a non-empty window");
    return substantial_volume / (length * f_d);
}

double periodicity_score(double sigma_vol, double sigma_time) { return 1.0 - sigma_vol - sigma_time; }

MetricsReport compute_metrics(const SampledSignal& sampled, double f_d) {
    const auto sub = substantial_io(sampled);
    MetricsReport m;
    const double unit = sampled.volume_unit;
    m.threshold = sub.threshold * unit;
    m.r_io = sub.r_io;
    if (sub.b_io) m.b_io = *sub.b_io * unit;
    m.sigma_vol = sigma_vol(sampled, f_d);
    m.sigma_time = sigma_time(sampled, f_d, sub.threshold);
    m.data_per_period = data_per_period(sub.substantial_volume, sub.length, f_d) * unit;
    m.score = periodicity_score(m.sigma_vol, m.sigma_time);
    m.periods_used = partition_periods(sampled, f_d).periods;
    return m;
}

nlohmann::json to_json(const MetricsReport& m) {
    return {
        {"threshold", m.threshold},
        {"r_io", m.r_io},
        {"b_io", m.b_io ? nlohmann::json(*m.b_io) : nlohmann::json(nullptr)},
        {"sigma_vol", m.sigma_vol},
        {"sigma_time", m.sigma_time},
        {"data_per_period", m.data_per_period},
        {"score", m.score},
        {"periods", m.periods_used},
    };
}

}  // namespace ioperiod
