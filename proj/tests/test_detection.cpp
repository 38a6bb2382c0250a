#include <cmath>
#include <vector>

#include <doctest.h>

#include "ioperiod/detection.hpp"
#include "ioperiod/error.hpp"

using namespace ioperiod;

namespace {

CandidateSet from_z(const std::vector<double>& z, double bin_width = 1.0) {
    CandidateSet s;
    s.bin_width = bin_width;
    s.sample_count = 2 * z.size() + 1;
    for (std::size_t i = 0; i < z.size(); ++i) s.entries.push_back({i + 1, (i + 1) * bin_width, 1.0, z[i]});
    return s;
}

CandidateSet candidates_at(const std::vector<std::pair<double, double>>& freq_amp, double bin_width) {
    CandidateSet s;
    s.bin_width = bin_width;
    for (auto [f, a] : freq_amp)
        s.entries.push_back({static_cast<std::size_t>(std::llround(f / bin_width)), f, a, 10.0});
    return s;
}

// Pulse train: `periods` periods of `bins` samples, first `on` samples high.
std::vector<double> pulses(std::size_t periods, std::size_t bins, std::size_t on) {
    std::vector<double> x(periods * bins, 0.0);
    for (std::size_t p = 0; p < periods; ++p)
        for (std::size_t i = 0; i < on; ++i) x[p * bins + i] = 1.0;
    return x;
}

}  // namespace

TEST_SUITE("detection") {

TEST_CASE("z-scores by hand") {
    const std::vector<double> a{0, 0, 0, 10};
    const auto z = zscores(a, 1.0);
    CHECK(z.mean_amplitude == doctest::Approx(2.5));
    CHECK(z.std_amplitude == doctest::Approx(4.3301270189));
    CHECK(z.entries[0].z == doctest::Approx(-0.5773502692));
    CHECK(z.entries[3].z == doctest::Approx(1.7320508076));
    CHECK(z.entries[3].k == 4);
}

TEST_CASE("equal amplitudes are degenerate") {
    CHECK_THROWS_AS(zscores(std::vector<double>{3, 3, 3, 3}, 1.0), DegenerateSpectrumError);
    const auto flat = dft(std::vector<double>(64, 5.0), 1.0);
    CHECK_THROWS_AS(zscores(flat), DegenerateSpectrumError);
    CHECK(detect_periodicity(flat).confidence == Confidence::NoCandidate);
    CHECK(detect_periodicity(dft(std::vector<double>(64, 0.0), 1.0)).confidence == Confidence::NoCandidate);
}

TEST_CASE("unique outlier") {
    const auto c = find_candidates(from_z({1, 1, 5, 1}));
    REQUIRE(c.entries.size() == 1);
    CHECK(c.entries[0].k == 3);
}

TEST_CASE("both thresholds apply") {
    // 3.5 is within 80% of 4 but 2.9 is below z_min.
    const auto c = find_candidates(from_z({4, 3.5, 2.9, 0}));
    CHECK(c.entries.size() == 2);
    DetectionOptions loose{0.5, 2.0};
    CHECK(find_candidates(from_z({4, 3.5, 2.9, 0}), loose).entries.size() == 3);
    CHECK(find_candidates(from_z({2.5, 1, 0, 0})).entries.empty());
    CHECK(count_outliers(from_z({4, 3.5, 2.9, 3.0})) == 2);
}

TEST_CASE("maximum ignores the Nyquist bin") {
    auto z = from_z({1, 5, 1, 9});
    z.sample_count = 8;  // k = 4 is Nyquist
    const auto c = find_candidates(z);
    REQUIRE(c.entries.size() == 2);
    CHECK(c.entries[0].k == 2);
    CHECK(c.entries[1].k == 4);
}

TEST_CASE("harmonic suppression") {
    const double w = 0.001;
    auto s = suppress_harmonics(candidates_at({{0.02, 1}, {0.01, 2}}, w));
    REQUIRE(s.kept.entries.size() == 1);
    CHECK(s.kept.entries[0].frequency == 0.01);
    REQUIRE(s.suppressed.size() == 1);
    CHECK(s.suppressed[0].frequency == 0.02);

    s = suppress_harmonics(candidates_at({{0.09, 1}}, w));
    CHECK(s.kept.entries.size() == 1);
    CHECK(s.suppressed.empty());

    s = suppress_harmonics(candidates_at({{0.01, 1}, {0.02, 1}, {0.04, 1}}, w));
    CHECK(s.kept.entries.size() == 1);
    CHECK(s.suppressed.size() == 2);

    // 3f is not a power-of-two multiple.
    s = suppress_harmonics(candidates_at({{0.01, 1}, {0.03, 1}}, w));
    CHECK(s.kept.entries.size() == 2);

    // Within half a bin.
    s = suppress_harmonics(candidates_at({{0.0100, 1}, {0.0204, 1}}, w));
    CHECK(s.kept.entries.size() == 1);
    s = suppress_harmonics(candidates_at({{0.0100, 1}, {0.0206, 1}}, w));
    CHECK(s.kept.entries.size() == 2);
}

TEST_CASE("classification table") {
    const double w = 0.0003;
    auto r = classify(candidates_at({{0.09, 1}}, w));
    CHECK(r.confidence == Confidence::High);
    CHECK(r.frequency() == 0.09);
    CHECK(*r.period() * *r.frequency() == doctest::Approx(1.0));

    r = classify(candidates_at({{0.1326, 4.0}, {0.1206, 5.0}}, w));
    CHECK(r.confidence == Confidence::Moderate);
    CHECK(r.frequency() == 0.1206);
    CHECK(*r.period() == doctest::Approx(8.29).epsilon(1e-3));

    r = classify(candidates_at({{0.039, 5.0}, {0.16, 2.0}}, w));
    CHECK(r.confidence == Confidence::Moderate);
    CHECK(*r.period() == doctest::Approx(25.64).epsilon(1e-3));

    r = classify(candidates_at({{0.2, 3.0}, {0.1, 3.0}}, w));
    CHECK(r.frequency() == 0.1);

    r = classify(candidates_at({{0.1, 1}, {0.13, 1}, {0.17, 1}}, w));
    CHECK(r.confidence == Confidence::Low);
    CHECK_FALSE(r.frequency());

    r = classify({});
    CHECK(r.confidence == Confidence::NoCandidate);
    CHECK_FALSE(r.period());
}

TEST_CASE("pulse train is detected on the exact bin") {
    const auto x = pulses(20, 50, 10);
    const auto s = dft(x, 5.0);
    const auto r = detect_periodicity(s);
    CHECK(r.confidence == Confidence::High);
    REQUIRE(r.dominant);
    CHECK(r.dominant->k == 20);
    CHECK(r.frequency() == doctest::Approx(0.1));
}

TEST_CASE("amplitude scaling keeps the candidate set") {
    auto x = pulses(16, 37, 9);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += 0.3 * std::sin(0.37 * static_cast<double>(i * i));
    auto y = x;
    for (auto& v : y) v *= 1024.0;
    const auto a = detect_periodicity(dft(x, 1.0));
    const auto b = detect_periodicity(dft(y, 1.0));
    REQUIRE(a.candidates.entries.size() == b.candidates.entries.size());
    for (std::size_t i = 0; i < a.candidates.entries.size(); ++i)
        CHECK(a.candidates.entries[i].k == b.candidates.entries[i].k);
    CHECK(a.confidence == b.confidence);
}

TEST_CASE("confidence names") {
    CHECK(to_string(Confidence::High) == "high");
    CHECK(to_string(Confidence::NoCandidate) == "none");
}

}
