#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ioperiod {

enum class IoKind : std::uint8_t { Read, Write };
enum class KindFilter : std::uint8_t { Read, Write, Both };

std::string_view to_string(IoKind kind) noexcept;
std::string_view to_string(KindFilter filter) noexcept;
KindFilter parse_kind_filter(std::string_view text);

struct IoRequest {
    std::uint32_t rank = 0;
    double start = 0.0;  // seconds since job start
    double end = 0.0;
    std::uint64_t bytes = 0;
    IoKind kind = IoKind::Write;

    double duration() const noexcept { return end - start; }
    bool matches(KindFilter filter) const noexcept;
};

using Metadata = std::map<std::string, std::string>;

/// Ordered collection of per-rank I/O requests. Immutable once built.
class Trace {
public:
    Trace() = default;
    explicit Trace(std::vector<IoRequest> requests, Metadata metadata = {});

    std::span<const IoRequest> requests() const noexcept { return requests_; }
    const Metadata& metadata() const noexcept { return metadata_; }
    bool empty() const noexcept { return requests_.empty(); }
    std::size_t size() const noexcept { return requests_.size(); }

    double start_time() const noexcept { return t_min_; }
    double end_time() const noexcept { return t_max_; }
    /// L(T) = max(end) - min(start); zero for an empty trace.
    double length() const noexcept { return empty() ? 0.0 : t_max_ - t_min_; }
    /// V(T) in bytes.
    std::uint64_t volume() const noexcept { return volume_; }

    /// Greatest common divisor of all non-zero byte counts (1 if none).
    std::uint64_t byte_quantum() const noexcept { return quantum_; }

    Trace filtered(KindFilter filter) const;
    /// Requests that finished no later than `t`, i.e. what a reader tailing
    /// the trace file would have seen at trace time `t`.
    Trace completed_by(double t) const;

private:
    std::vector<IoRequest> requests_;
    Metadata metadata_;
    double t_min_ = 0.0;
    double t_max_ = 0.0;
    std::uint64_t volume_ = 0;
    std::uint64_t quantum_ = 1;
};

struct ParseOptions {
    KindFilter kind = KindFilter::Both;
    /// Tailing a file that is still being appended: an unterminated last
    /// line may be a partial write and is always skipped.
    bool tail = false;
    /// Added to reported line numbers when parsing a chunk of a larger file.
    std::size_t first_line = 1;
};

Trace parse_trace(std::istream& in, const ParseOptions& options = {});
Trace parse_trace(std::string_view text, const ParseOptions& options = {});
Trace load_trace(const std::filesystem::path& path, const ParseOptions& options = {});

/// One JSON object per line; metadata (if any) first, tagged "meta": true.
void write_trace(std::ostream& out, const Trace& trace);
std::string format_request(const IoRequest& request);

struct Breakpoint {
    double time;
    double bandwidth;
};

/// Piecewise-constant application bandwidth. Breakpoint i holds on
/// [time_i, time_{i+1}); the final breakpoint has bandwidth zero and marks
/// the end of the domain. Bandwidth is in `volume_unit` bytes per second.
class BandwidthSignal {
public:
    BandwidthSignal() = default;
    BandwidthSignal(std::vector<Breakpoint> breakpoints, double volume_unit);

    std::span<const Breakpoint> breakpoints() const noexcept { return breakpoints_; }
    bool empty() const noexcept { return breakpoints_.empty(); }
    double t_min() const noexcept { return empty() ? 0.0 : breakpoints_.front().time; }
    double t_max() const noexcept { return empty() ? 0.0 : breakpoints_.back().time; }
    double volume_unit() const noexcept { return volume_unit_; }

    /// Right-limit value at `t`; zero outside the domain.
    double value_at(double t) const noexcept;
    /// Integral of bandwidth over [lo, hi], in volume units.
    double integral(double lo, double hi) const noexcept;
    double volume() const noexcept { return integral(t_min(), t_max()); }

private:
    std::vector<Breakpoint> breakpoints_;
    double volume_unit_ = 1.0;
};

/// Sums per-request uniform rates into one application-level signal.
/// With `volume_unit` > 1 every byte count is divided by it first; the
/// unit must divide all byte counts (see Trace::byte_quantum). Zero-byte
/// requests are ignored; a zero-duration request with bytes is an error.
BandwidthSignal merge_bandwidth(const Trace& trace, std::uint64_t volume_unit = 1);

}  // namespace ioperiod
