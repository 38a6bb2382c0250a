#include "ioperiod/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "ioperiod/error.hpp"
#include "ioperiod/kernels.hpp"

namespace ioperiod {

double SampledSignal::volume() const noexcept { return kernels::sum(samples) / fs; }

SampledSignal SampledSignal::scaled(double factor) const {
    SampledSignal out = *this;
    for (auto& x : out.samples) x *= factor;
    out.volume_unit = volume_unit / factor;
    return out;
}

std::size_t sample_count(double fs, const TimeWindow& window) {
    const double n = window.length() * fs;
    if (!(n > 0)) return 0;
    return static_cast<std::size_t>(std::floor(n + n * 1e-9));
}

SampledSignal discretize(const BandwidthSignal& signal, double fs, const TimeWindow& window,
                         SamplingMode mode) {
    if (!(fs > 0) || !std::isfinite(fs)) throw ArgumentError("sampling frequency must be positive");
    if (!(window.hi > window.lo)) throw ArgumentError("sampling window is empty");
    const std::size_t n = sample_count(fs, window);
    if (n == 0) throw ArgumentError("sampling window is shorter than one sampling period");

    SampledSignal out;
    out.t0 = window.lo;
    out.fs = fs;
    out.volume_unit = signal.volume_unit();
    out.samples.assign(n, 0.0);

    const auto bps = signal.breakpoints();
    if (bps.empty()) return out;

    if (mode == SamplingMode::Point) {
        // Sample times increase monotonically, so one forward walk suffices.
        std::size_t j = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = out.time_at(i);
            if (t < bps.front().time || t >= bps.back().time) continue;
            while (j + 1 < bps.size() && bps[j + 1].time <= t) ++j;
            out.samples[i] = bps[j].bandwidth;
        }
    } else {
        std::size_t j = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double a = out.time_at(i);
            const double b = out.time_at(i + 1);
            while (j + 1 < bps.size() && bps[j + 1].time <= a) ++j;
            double acc = 0.0;
            for (std::size_t k = j; k + 1 < bps.size() && bps[k].time < b; ++k) {
                const double lo = std::max(a, bps[k].time);
                const double hi = std::min(b, bps[k + 1].time);
                if (hi > lo) acc += bps[k].bandwidth * (hi - lo);
            }
            out.samples[i] = acc * fs;
        }
    }
    return out;
}

double sampling_error(const BandwidthSignal& signal, const SampledSignal& sampled) {
    const double v0 = signal.integral(sampled.t0, sampled.t_end());
    if (!(v0 > 0)) throw NoDataError("no I/O volume in the sampled window; sampling error undefined");
    return (sampled.volume() - v0) / v0;
}

}  // namespace ioperiod
