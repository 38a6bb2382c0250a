#include "ioperiod/trace.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "ioperiod/error.hpp"

namespace ioperiod {

std::string_view to_string(IoKind kind) noexcept {
    return kind == IoKind::Read ? "read" : "write";
}

std::string_view to_string(KindFilter filter) noexcept {
    switch (filter) {
        case KindFilter::Read: return "read";
        case KindFilter::Write: return "write";
        case KindFilter::Both: return "both";
    }
    return "both";
}

KindFilter parse_kind_filter(std::string_view text) {
    if (text == "read") return KindFilter::Read;
    if (text == "write") return KindFilter::Write;
    if (text == "both") return KindFilter::Both;
    throw ArgumentError("unknown kind filter '" + std::string(text) + "' (expected read|write|both)");
}

bool IoRequest::matches(KindFilter filter) const noexcept {
    switch (filter) {
        case KindFilter::Read: return kind == IoKind::Read;
        case KindFilter::Write: return kind == IoKind::Write;
        case KindFilter::Both: return true;
    }
    return true;
}

Trace::Trace(std::vector<IoRequest> requests, Metadata metadata)
    : requests_(std::move(requests)), metadata_(std::move(metadata)) {
    if (requests_.empty()) return;
    t_min_ = requests_.front().start;
    t_max_ = requests_.front().end;
    std::uint64_t g = 0;
    for (const auto& r : requests_) {
        if (!(r.end >= r.start) || !std::isfinite(r.start) || !std::isfinite(r.end))
            throw ValidationError("request on rank " + std::to_string(r.rank) + " has end < start");
        t_min_ = std::min(t_min_, r.start);
        t_max_ = std::max(t_max_, r.end);
        volume_ += r.bytes;
        if (r.bytes != 0) g = std::gcd(g, r.bytes);
    }
    quantum_ = g == 0 ? 1 : g;
}

Trace Trace::filtered(KindFilter filter) const {
    if (filter == KindFilter::Both) return *this;
    std::vector<IoRequest> kept;
    kept.reserve(requests_.size());
    std::copy_if(requests_.begin(), requests_.end(), std::back_inserter(kept),
                 [filter](const IoRequest& r) { return r.matches(filter); });
    return Trace(std::move(kept), metadata_);
}

Trace Trace::completed_by(double t) const {
    std::vector<IoRequest> kept;
    std::copy_if(requests_.begin(), requests_.end(), std::back_inserter(kept),
                 [t](const IoRequest& r) { return r.end <= t; });
    return Trace(std::move(kept), metadata_);
}

namespace {

using nlohmann::json;

std::uint64_t read_count(const json& value, std::size_t line, const char* field) {
    if (value.is_number_unsigned()) return value.get<std::uint64_t>();
    if (value.is_number_integer()) {
        auto v = value.get<std::int64_t>();
        if (v < 0) throw ValidationError("line " + std::to_string(line) + ": negative " + field);
        return static_cast<std::uint64_t>(v);
    }
    if (value.is_number_float()) {
        double v = value.get<double>();
        if (v < 0) throw ValidationError("line " + std::to_string(line) + ": negative " + field);
        if (v != std::floor(v) || v > 1.8e19)
            throw ParseError(line, std::string(field) + " must be an integer");
        return static_cast<std::uint64_t>(v);
    }
    throw ParseError(line, std::string(field) + " must be a number");
}

double read_time(const json& value, std::size_t line, const char* field) {
    if (!value.is_number()) throw ParseError(line, std::string(field) + " must be a number");
    double v = value.get<double>();
    if (!std::isfinite(v)) throw ParseError(line, std::string(field) + " is not finite");
    return v;
}

const json& field(const json& obj, const char* name, std::size_t line) {
    auto it = obj.find(name);
    if (it == obj.end()) throw ParseError(line, std::string("missing field '") + name + "'");
    return *it;
}

IoRequest to_request(const json& obj, std::size_t line) {
    IoRequest r;
    r.rank = static_cast<std::uint32_t>(read_count(field(obj, "rank", line), line, "rank"));
    r.start = read_time(field(obj, "start", line), line, "start");
    r.end = read_time(field(obj, "end", line), line, "end");
    r.bytes = read_count(field(obj, "bytes", line), line, "bytes");
    const auto& kind = field(obj, "kind", line);
    if (!kind.is_string()) throw ParseError(line, "kind must be a string");
    const auto& k = kind.get_ref<const std::string&>();
    if (k == "read")
        r.kind = IoKind::Read;
    else if (k == "write")
        r.kind = IoKind::Write;
    else
        throw ParseError(line, "unknown kind '" + k + "'");
    if (r.end < r.start)
        throw ValidationError("line " + std::to_string(line) + ": negative duration");
    return r;
}

}  // namespace

Trace parse_trace(std::string_view text, const ParseOptions& options) {
    std::vector<IoRequest> requests;
    Metadata metadata;
    bool seen_record = false;
    std::size_t line_no = options.first_line;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        bool terminated = nl != std::string_view::npos;
        auto line = text.substr(pos, terminated ? nl - pos : std::string_view::npos);
        pos = terminated ? nl + 1 : text.size();
        const std::size_t this_line = line_no++;

        if (!terminated && options.tail) break;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

        json obj = json::parse(line.begin(), line.end(), nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            // A torn final write is expected while the producer is appending.
            if (!terminated) break;
            throw ParseError(this_line, "not a JSON object");
        }
        if (auto meta = obj.find("meta"); meta != obj.end() && meta->is_boolean() && meta->get<bool>()) {
            if (seen_record) throw ParseError(this_line, "metadata must precede all records");
            for (const auto& [key, value] : obj.items()) {
                if (key == "meta") continue;
                metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
            }
            continue;
        }
        seen_record = true;
        IoRequest r = to_request(obj, this_line);
        if (r.matches(options.kind)) requests.push_back(r);
    }
    return Trace(std::move(requests), std::move(metadata));
}

Trace parse_trace(std::istream& in, const ParseOptions& options) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_trace(std::string_view(buffer.str()), options);
}

Trace load_trace(const std::filesystem::path& path, const ParseOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open trace file '" + path.string() + "'");
    return parse_trace(in, options);
}

namespace {

void append_double(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string_view text(buf, static_cast<std::size_t>(ptr - buf));
    out.append(text);
    // Keep the value a JSON float so readers do not infer an integer type.
    if (text.find_first_of(".eE") == std::string_view::npos && text.find("inf") == std::string_view::npos)
        out.append(".0");
}

}  // namespace

std::string format_request(const IoRequest& r) {
    std::string out;
    out.reserve(96);
    out += "{\"rank\":";
    out += std::to_string(r.rank);
    out += ",\"start\":";
    append_double(out, r.start);
    out += ",\"end\":";
    append_double(out, r.end);
    out += ",\"bytes\":";
    out += std::to_string(r.bytes);
    out += ",\"kind\":\"";
    out += to_string(r.kind);
    out += "\"}";
    return out;
}

void write_trace(std::ostream& out, const Trace& trace) {
    if (!trace.metadata().empty()) {
        nlohmann::json meta = {{"meta", true}};
        for (const auto& [key, value] : trace.metadata()) meta[key] = value;
        out << meta.dump() << '\n';
    }
    for (const auto& r : trace.requests()) out << format_request(r) << '\n';
}

// ---------------------------------------------------------------------------
// Bandwidth merging

BandwidthSignal::BandwidthSignal(std::vector<Breakpoint> breakpoints, double volume_unit)
    : breakpoints_(std::move(breakpoints)), volume_unit_(volume_unit) {
    for (std::size_t i = 1; i < breakpoints_.size(); ++i)
        if (!(breakpoints_[i].time > breakpoints_[i - 1].time))
            throw ValidationError("bandwidth breakpoints must be strictly increasing");
    for (const auto& b : breakpoints_)
        if (b.bandwidth < 0) throw ValidationError("bandwidth must be non-negative");
}

double BandwidthSignal::value_at(double t) const noexcept {
    if (empty() || t < t_min() || t >= t_max()) return 0.0;
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t,
                               [](double v, const Breakpoint& b) { return v < b.time; });
    return std::prev(it)->bandwidth;
}

double BandwidthSignal::integral(double lo, double hi) const noexcept {
    if (empty() || hi <= lo) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
        double a = std::max(lo, breakpoints_[i].time);
        double b = std::min(hi, breakpoints_[i + 1].time);
        if (b > a) total += breakpoints_[i].bandwidth * (b - a);
    }
    return total;
}

namespace {

// Start events carry a positive rate, end events the negated rate, so the
// sign doubles as the start/end flag.
struct RateEvent {
    double time;
    double delta;

    friend bool operator<(const RateEvent& a, const RateEvent& b) noexcept {
        if (a.time != b.time) return a.time < b.time;
        return a.delta < b.delta;
    }
};

// Order-preserving map from double to unsigned.
std::uint64_t sort_key(double t) noexcept {
    const auto u = std::bit_cast<std::uint64_t>(t == 0.0 ? 0.0 : t);
    return (u >> 63) ? ~u : (u | 0x8000000000000000ULL);
}

// LSD radix sort on the time bits, 16 bits per pass; passes where every key
// shares the digit are skipped. Stable, then equal-time runs are ordered by
// rate.
void sort_events(std::vector<RateEvent>& events) {
    constexpr std::size_t kRadix = 1 << 16;
    const std::size_t n = events.size();
    std::vector<std::uint32_t> hist(4 * kRadix, 0);
    for (const auto& e : events) {
        const auto k = sort_key(e.time);
        for (std::size_t d = 0; d < 4; ++d) ++hist[d * kRadix + ((k >> (16 * d)) & 0xffff)];
    }
    std::vector<RateEvent> scratch(n);
    RateEvent* src = events.data();
    RateEvent* dst = scratch.data();
    for (std::size_t d = 0; d < 4; ++d) {
        std::uint32_t* h = &hist[d * kRadix];
        if (h[(sort_key(src[0].time) >> (16 * d)) & 0xffff] == n) continue;
        std::uint32_t offset = 0;
        for (std::size_t i = 0; i < kRadix; ++i) offset += std::exchange(h[i], offset);
        for (std::size_t i = 0; i < n; ++i) dst[h[(sort_key(src[i].time) >> (16 * d)) & 0xffff]++] = src[i];
        std::swap(src, dst);
    }
    if (src != events.data()) std::copy(src, src + n, events.data());

    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && events[j].time == events[i].time) ++j;
        if (j - i == 2) {
            if (events[i + 1].delta < events[i].delta) std::swap(events[i], events[i + 1]);
        } else if (j - i > 2) {
            std::sort(events.begin() + static_cast<std::ptrdiff_t>(i), events.begin() + static_cast<std::ptrdiff_t>(j));
        }
        i = j;
    }
}

}  // namespace

BandwidthSignal merge_bandwidth(const Trace& trace, std::uint64_t volume_unit) {
    if (volume_unit == 0) throw ArgumentError("volume unit must be positive");
    std::vector<RateEvent> events;
    events.reserve(2 * trace.size());
    for (const auto& r : trace.requests()) {
        if (r.bytes == 0) continue;
        const double d = r.duration();
        if (d <= 0)
            throw ValidationError("zero-duration request with " + std::to_string(r.bytes) +
                                  " bytes on rank " + std::to_string(r.rank) + " has no defined rate");
        if (r.bytes % volume_unit != 0) throw ArgumentError("volume unit does not divide byte counts");
        const double rate = static_cast<double>(r.bytes / volume_unit) / d;
        events.push_back({r.start, rate});
        events.push_back({r.end, -rate});
    }
    if (events.empty()) throw ArgumentError("trace has no requests carrying bytes");

    // Total order on (time, rate) makes the floating-point running sum
    // independent of the input request order.
    sort_events(events);

    std::vector<Breakpoint> out;
    out.reserve(events.size());
    double level = 0.0;
    std::int64_t active = 0;
    for (std::size_t i = 0; i < events.size();) {
        const double t = events[i].time;
        for (; i < events.size() && events[i].time == t; ++i) {
            level += events[i].delta;
            active += events[i].delta > 0 ? 1 : -1;
        }
        if (active == 0 || level < 0) level = 0.0;
        const bool last = i == events.size();
        if (!last && !out.empty() && out.back().bandwidth == level) continue;
        out.push_back({t, level});
    }
    return BandwidthSignal(std::move(out), static_cast<double>(volume_unit));
}

}  // namespace ioperiod
