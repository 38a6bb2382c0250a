#pragma once

#include <cstddef>
#include <vector>

#include "ioperiod/trace.hpp"

namespace ioperiod {

struct TimeWindow {
    double lo;
    double hi;

    double length() const noexcept { return hi - lo; }
};

enum class SamplingMode {
    Point,      // x_n = x(t0 + n/fs), right-limit at breakpoints
    Integrate,  // mean bandwidth over [t_n, t_n + Ts); volume-exact
};

/// Evenly spaced bandwidth samples. Sample n sits at t0 + n/fs.
struct SampledSignal {
    double t0 = 0.0;
    double fs = 1.0;
    std::vector<double> samples;
    double volume_unit = 1.0;

    std::size_t size() const noexcept { return samples.size(); }
    double ts() const noexcept { return 1.0 / fs; }
    double time_at(std::size_t n) const noexcept { return t0 + static_cast<double>(n) / fs; }
    /// End of the sampled span, t0 + N/fs.
    double t_end() const noexcept { return time_at(samples.size()); }
    /// Zero-order-hold volume Ts * sum(x_n), in volume units.
    double volume() const noexcept;
    SampledSignal scaled(double factor) const;
};

/// N = floor((hi - lo) * fs); a relative slack of 1e-9 absorbs products
/// such as 76.05 * 100 landing just below an integer.
std::size_t sample_count(double fs, const TimeWindow& window);

SampledSignal discretize(const BandwidthSignal& signal, double fs, const TimeWindow& window,
                         SamplingMode mode = SamplingMode::Point);

/// (V_s - V_0) / V_0 over the sampled span [t0, t0 + N/fs].
double sampling_error(const BandwidthSignal& signal, const SampledSignal& sampled);

inline constexpr double kBadSamplingThreshold = 0.01;

inline bool is_bad_sampling(double error) noexcept {
    return error > kBadSamplingThreshold || error < -kBadSamplingThreshold;
}

}  // namespace ioperiod
