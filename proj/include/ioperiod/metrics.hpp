#pragma once

#include <cstddef>
#include <optional>

#include <json.hpp>

#include "ioperiod/sampling.hpp"

namespace ioperiod {

// All metrics work on the discretised signal: one sampling bin is one
// time unit, and the partition into periods starts at the first sample.

struct SubstantialIo {
    double threshold = 0.0;  // V(T)/L(T), volume units per second
    double r_io = 0.0;       // L(S)/L(T)
    std::optional<double> b_io;  // V(S)/L(S); absent when S is empty
    double substantial_volume = 0.0;  // V(S)
    double total_volume = 0.0;        // V(T)
    double length = 0.0;              // L(T) = N/fs
    std::size_t substantial_bins = 0;
};

/// Bins strictly above the trace-average bandwidth count as substantial.
SubstantialIo substantial_io(const SampledSignal& sampled);

/// Split of the sampled span into Lf = floor(L * f_d) periods of 1/f_d;
/// the trailing partial period is dropped.
struct PeriodPartition {
    std::size_t periods = 0;
    std::vector<std::size_t> bounds;  // periods + 1 sample indices

    std::size_t begin(std::size_t i) const { return bounds[i]; }
    std::size_t end(std::size_t i) const { return bounds[i + 1]; }
};

/// Throws InsufficientPeriodsError when fewer than two periods fit.
PeriodPartition partition_periods(const SampledSignal& sampled, double f_d);

/// Population std of per-period volume normalised by the largest one.
double sigma_vol(const SampledSignal& sampled, double f_d);

/// RMS deviation of the per-period substantial-time fraction from R_IO,
/// where R_IO is measured over the complete periods. Clamped to 0.5.
double sigma_time(const SampledSignal& sampled, double f_d, double threshold);

/// V(S) / (L(T) * f_d).
double data_per_period(double substantial_volume, double length, double f_d);

/// 1 - sigma_vol - sigma_time.
double periodicity_score(double sigma_vol, double sigma_time);

struct MetricsReport {
    double threshold = 0.0;  // bytes/s
    double r_io = 0.0;
    std::optional<double> b_io;  // bytes/s
    double sigma_vol = 0.0;
    double sigma_time = 0.0;
    double data_per_period = 0.0;  // bytes
    double score = 0.0;
    std::size_t periods_used = 0;
};

/// Full report for dominant frequency `f_d`; dimensioned fields are
/// converted to bytes using the signal's volume unit.
MetricsReport compute_metrics(const SampledSignal& sampled, double f_d);

nlohmann::json to_json(const MetricsReport& report);

}  // namespace ioperiod
