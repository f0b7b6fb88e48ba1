#include "support.hpp"
#include "../oracles.hpp"

#include "dasflow/detect.hpp"
#include "dasflow/preprocess.hpp"
#include "dasflow/scenarios.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace dasflow;

namespace {

double rms(std::span<const double> v, std::size_t from = 0) {
    double s = 0;
    for (std::size_t i = from; i < v.size(); ++i) s += v[i] * v[i];
    return std::sqrt(s / static_cast<double>(v.size() - from));
}

sim::Scene three_vehicles() {
    sim::Scene s;
    s.duration = 45.0;
    const double entries[] = {5.0, 17.0, 29.0};
    const double kmh[] = {80.0, 95.0, 70.0};
    for (int i = 0; i < 3; ++i) {
        sim::VehicleSpec v;
        v.entry_time = entries[i];
        v.velocity = kmh[i] / 3.6;
        s.vehicles.push_back(v);
    }
    return s;
}

} // namespace

TEST_CASE("Butterworth passes DC unchanged") {
    const std::vector<double> c(200, 0.37);
    for (int order : {1, 2, 3, 4}) {
        ButterworthConfig cfg;
        cfg.order = order;
        for (double y : butterworth_lowpass(c, cfg)) CHECK(std::fabs(y - 0.37) < 1e-9);
        const auto sos = butterworth_design(order, 0.3);
        CHECK(std::abs(frequency_response(sos, 0.0)) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("Butterworth design matches the analytic magnitude") {
    for (int order : {1, 2, 5}) {
        for (double wn : {0.1, 0.5, 0.8}) {
            const auto sos = butterworth_design(order, wn);
            for (double f = 0.01; f < 0.99; f += 0.07)
                CHECK(std::abs(frequency_response(sos, f)) ==
                      doctest::Approx(oracle::butterworth_gain(f, wn, order)).epsilon(1e-9));
        }
    }
}

TEST_CASE("a tone at the cutoff is attenuated to 1/sqrt(2) per pass") {
    const auto sos = butterworth_design(1, 0.5);
    std::vector<double> x(4096);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(std::numbers::pi * 0.5 * static_cast<double>(i));
    const auto y = sos_filter(sos, x);
    const double gain = rms(y, 2048) / rms(x, 2048);
    CHECK(std::fabs(gain - 1.0 / std::sqrt(2.0)) < 0.02 / std::sqrt(2.0));
}

TEST_CASE("Nyquist alternation is suppressed") {
    std::vector<double> x(512);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = i % 2 ? -1.0 : 1.0;
    const auto y = butterworth_lowpass(x, ButterworthConfig{});
    CHECK(rms(y) < 0.2 * rms(x));
}

TEST_CASE("Butterworth low-pass is linear") {
    std::mt19937 rng(3);
    std::normal_distribution<double> g;
    std::vector<double> x(300), y(300), mix(300);
    for (auto& v : x) v = g(rng);
    for (auto& v : y) v = g(rng);
    for (std::size_t i = 0; i < 300; ++i) mix[i] = 2.5 * x[i] - 0.7 * y[i];
    ButterworthConfig cfg;
    cfg.order = 3;
    cfg.cutoff = 0.2;
    const auto fx = butterworth_lowpass(x, cfg), fy = butterworth_lowpass(y, cfg), fm = butterworth_lowpass(mix, cfg);
    for (std::size_t i = 0; i < 300; ++i) CHECK(std::fabs(fm[i] - (2.5 * fx[i] - 0.7 * fy[i])) < 1e-9);
}

TEST_CASE("Butterworth rejects bad configs and short signals") {
    ButterworthConfig cfg;
    cfg.cutoff = 1.0;
    CHECK_THROWS(validate(cfg));
    cfg.cutoff = 0.5;
    cfg.order = 0;
    CHECK_THROWS(validate(cfg));
    CHECK_THROWS(butterworth_lowpass(std::vector<double>(7, 1.0), ButterworthConfig{}));
}

TEST_CASE("peak search examples") {
    const std::vector<double> v{0, 1, 0, 2, 0};
    const auto p = find_peaks(v, 0.0);
    REQUIRE(p.size() == 2);
    CHECK(p[0].index == 1);
    CHECK(p[0].height == 1.0);
    CHECK(p[1].index == 3);
    CHECK(p[1].height == 2.0);

    CHECK(find_peaks(std::vector<double>(6, 2.0), 0.0).empty());
    CHECK(find_peaks(std::vector<double>{1, 2, 3, 4}, 0.0).empty());
    CHECK(find_peaks(std::vector<double>{4, 3, 2, 1}, 0.0).empty());

    const auto plateau = find_peaks(std::vector<double>{0, 1, 1, 0}, 0.0);
    REQUIRE(plateau.size() == 1);
    CHECK(plateau[0].index == 1);

    CHECK(find_peaks(v, 1.5).size() == 1);
}

TEST_CASE("troughs are found alongside crests") {
    const auto e = find_extrema(std::vector<double>{3, 1, 2, 0, 5});
    CHECK(e.crests == std::vector<std::size_t>{2});
    CHECK(e.troughs == std::vector<std::size_t>{1, 3});
}

TEST_CASE("peak search agrees with brute force") {
    std::mt19937 rng(99);
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 1 + rng() % 64;
        std::vector<double> v(n);
        for (auto& x : v) x = (k % 2) ? static_cast<double>(rng() % 4) : std::uniform_real_distribution<>(0, 1)(rng);
        const auto got = find_peaks(v, -INFINITY);
        const auto want = oracle::local_maxima(v);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].index == want[i]);
            if (i) CHECK(got[i].index > got[i - 1].index);
        }
    }
}

TEST_CASE("half-height width") {
    const std::vector<double> v{0, 0.2, 0.6, 1.0, 0.7, 0.4, 0.0};
    CHECK(half_height_width(v, 3) == 3);
    CHECK(half_height_width(std::vector<double>{0, 1, 0}, 1) == 1);
}

TEST_CASE("separate_peaks keeps the tallest of close peaks") {
    const std::vector<Peak> p{{10, 0.5, 1}, {14, 0.9, 1}, {30, 0.3, 1}, {33, 0.3, 1}};
    const auto kept = separate_peaks(p, 5.0);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].index == 14);
    CHECK(kept[1].index == 30);
    CHECK(separate_peaks(p, 0.0).size() == 4);
    CHECK(separate_peaks(p, 1000.0).size() == 1);
}

TEST_CASE("zero matrix yields no events") {
    const auto m = support::matrix(100, 5, std::vector<double>(500, 0.0), 0.05, 0.4);
    CHECK(detect_entries(m, DetectConfig{}).empty());
}

TEST_CASE("three separated noiseless vehicles give three events") {
    const auto syn = sim::synthesize_waterfall(three_vehicles());
    const auto events = detect_entries(minmax_normalize(syn.matrix), DetectConfig{});
    REQUIRE(events.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(events[i].vehicle_id == i + 1);
        CHECK(events[i].entry_col == 0);
        const auto truth_row = static_cast<double>(*syn.truth.vehicles[i].entry_row());
        CHECK(std::fabs(static_cast<double>(events[i].entry_row) - truth_row) <= 2.0);
        CHECK(events[i].peak.height >= DetectConfig{}.min_height);
        if (i) CHECK(events[i].entry_row > events[i - 1].entry_row);
    }
}

TEST_CASE("low-pass filtering does not add peaks on a noisy column") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto m = minmax_normalize(sim::synthesize_waterfall(sim::simple_scene(seed)).matrix);
        const auto col = m.column(0);
        const auto raw = find_peaks(col, 0.06).size();
        const auto smooth = find_peaks(butterworth_lowpass(col, ButterworthConfig{}), 0.06).size();
        CHECK(raw >= smooth);
    }
}

TEST_CASE("detection is deterministic and scale invariant after normalization") {
    const auto raw = sim::synthesize_waterfall(sim::simple_scene(21)).matrix;
    const auto a = detect_entries(minmax_normalize(raw), DetectConfig{});
    std::vector<double> scaled(raw.values().begin(), raw.values().end());
    for (auto& v : scaled) v *= 123.0;
    const auto b = detect_entries(minmax_normalize(raw.with_values(scaled)), DetectConfig{});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].entry_row == b[i].entry_row);
    const auto c = detect_entries(minmax_normalize(raw), DetectConfig{});
    REQUIRE(c.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(c[i].peak == a[i].peak);
}
