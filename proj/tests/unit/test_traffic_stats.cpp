#include "dasflow/errors.hpp"
#include "dasflow/traffic_stats.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <random>

using namespace dasflow;

namespace {

const Sampling kS{0.05, 0.4, 0.0, 0.0, std::nullopt};

// Straight path entering column 0 at `entry_row`, covering the whole 800-column span.
Trajectory straight(std::size_t id, double kmh, double entry_row) {
    Trajectory t;
    t.vehicle_id = id;
    t.sampling = kS;
    const double slope = kmh / 3.6 * kS.dt / kS.dx;
    const auto r0 = static_cast<std::size_t>(std::ceil(entry_row));
    const auto r1 = static_cast<std::size_t>(std::floor(entry_row + 799.0 / slope));
    t.points = {{r0, 0}, {r1, 799}};
    t.coeffs = {-slope * entry_row, slope};
    t.velocity_kmh = kmh;
    return t;
}

} // namespace

TEST_CASE("profile flow and time-mean speed") {
    const std::vector<Trajectory> t{straight(1, 30.0, 100.0), straight(2, 60.0, 300.0)};
    const auto r = profile_stats(t, {100.0, 0.0, 60.0});
    CHECK(r.vehicle_count == 2.0);
    REQUIRE(r.mean_speed.has_value());
    CHECK(*r.mean_speed == doctest::Approx(40.0).epsilon(1e-12));
    CHECK(r.flow == doctest::Approx(2.0 / 60.0).epsilon(1e-15));
    CHECK(r.density * *r.mean_speed == doctest::Approx(r.flow).epsilon(1e-15));
}

TEST_CASE("equal speeds give equal time and space means") {
    std::vector<Trajectory> t;
    for (int i = 0; i < 4; ++i) t.push_back(straight(i + 1, 72.0, 40.0 + 200.0 * i));
    const auto p = profile_stats(t, {150.0, 0.0, 120.0});
    const auto s = segment_stats(t, {0.0, 319.6, 20.0, 60.0, 1.0});
    REQUIRE(p.mean_speed);
    REQUIRE(s.mean_speed);
    CHECK(*p.mean_speed == doctest::Approx(72.0).epsilon(1e-9));
    CHECK(*s.mean_speed == doctest::Approx(72.0).epsilon(1e-9));
}

TEST_CASE("segment space-mean speed and density") {
    const std::vector<Trajectory> t{straight(1, 30.0, 0.0), straight(2, 60.0, 0.0)};
    // At 10 s both are inside a 0..319.6 m span.
    const auto r = segment_stats(t, {0.0, 319.6, 10.0, 10.0, 1.0});
    CHECK(r.vehicle_count == 2.0);
    REQUIRE(r.mean_speed);
    CHECK(*r.mean_speed == doctest::Approx(45.0).epsilon(1e-12));
    CHECK(r.density == doctest::Approx(2.0 / 319.6).epsilon(1e-12));
    CHECK(r.flow == doctest::Approx(r.density * 45.0).epsilon(1e-12));
}

TEST_CASE("doubling the segment length halves density and flow") {
    const std::vector<Trajectory> t{straight(1, 50.0, 0.0)};
    const auto a = segment_stats(t, {0.0, 100.0, 5.0, 5.0, 1.0});
    const auto b = segment_stats(t, {0.0, 200.0, 5.0, 5.0, 1.0});
    CHECK(a.vehicle_count == 1.0);
    CHECK(b.density == doctest::Approx(a.density / 2).epsilon(1e-12));
    CHECK(b.flow == doctest::Approx(a.flow / 2).epsilon(1e-12));
    CHECK(*b.mean_speed == *a.mean_speed);
}

TEST_CASE("an empty window reports no speed") {
    const std::vector<Trajectory> t{straight(1, 50.0, 5000.0)};
    const auto r = profile_stats(t, {100.0, 0.0, 60.0});
    CHECK(r.vehicle_count == 0.0);
    CHECK_FALSE(r.mean_speed.has_value());
    CHECK(report_json(r)["average_velocity_kmh"].is_null());
}

TEST_CASE("crossings are limited to the trajectory's own span") {
    auto t = straight(1, 50.0, 0.0);
    t.points.back() = {t.points.front().row + 100, 0};
    t.points.back().col = static_cast<std::size_t>(t.column_at(static_cast<double>(t.points.back().row)));
    const std::vector<Trajectory> v{t};
    CHECK(profile_crossings(v, {300.0, 0.0, 1000.0}).empty());
    CHECK(profile_crossings(v, {5.0, 0.0, 1000.0}).size() == 1);
}

TEST_CASE("zero speed at the profile is a numeric error") {
    Trajectory t;
    t.vehicle_id = 7;
    t.sampling = kS;
    t.points = {{0, 100}, {100, 100}};
    t.coeffs = {100.0, 0.0};
    const std::vector<Trajectory> v{t};
    CHECK_THROWS_AS(profile_stats(v, {40.0, 0.0, 10.0}), NumericError);
}

TEST_CASE("table rows reproduce after truncation") {
    CHECK(truncate_decimals((4.0 / 60.0) / 56.38, 4) == doctest::Approx(0.0011));
    CHECK(truncate_decimals(0.05 / 59.93, 4) == doctest::Approx(0.0008));
    CHECK(truncate_decimals(0.03 / 59.27, 4) == doctest::Approx(0.0005));
    CHECK(truncate_decimals(0.10 / 54.07, 4) == doctest::Approx(0.0018));
    CHECK(truncate_decimals(0.0100 * 55.97, 2) == doctest::Approx(0.55));
    CHECK(truncate_decimals(0.0050 * 55.97, 2) == doctest::Approx(0.27));
    CHECK(truncate_decimals(0.0100 * 65.76, 2) == doctest::Approx(0.65));
    CHECK(truncate_decimals(0.0050 * 65.76, 2) == doctest::Approx(0.32));
    CHECK(truncate_decimals(4.0 / 60.0, 2) == doctest::Approx(0.06));
    CHECK(truncate_decimals(0.1 * 3.0, 1) == doctest::Approx(0.3));
    CHECK(truncate_decimals(-0.129, 2) == doctest::Approx(-0.12));
}

TEST_CASE("identities, harmonic bound and additivity on random traffic") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> speed(20.0, 140.0), entry(0.0, 1500.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Trajectory> t;
        for (std::size_t i = 0; i < 6; ++i) t.push_back(straight(i + 1, speed(rng), entry(rng)));
        const auto p = profile_stats(t, {160.0, 0.0, 200.0});
        if (p.mean_speed) CHECK(std::fabs(p.density * *p.mean_speed - p.flow) <= 1e-15 * std::max(1.0, p.flow));
        const auto a = profile_stats(t, {160.0, 0.0, 70.0});
        const auto b = profile_stats(t, {160.0, 70.0, 200.0});
        CHECK(a.vehicle_count + b.vehicle_count == p.vehicle_count);

        const auto s = segment_stats(t, {0.0, 319.6, 30.0, 90.0, 1.0});
        if (s.mean_speed) CHECK(std::fabs(s.density * *s.mean_speed - s.flow) <= 1e-15 * std::max(1.0, s.flow));

        const auto c = profile_crossings(t, {160.0, 0.0, 1e9});
        if (c.size() >= 2) {
            double inv = 0, sum = 0;
            for (const auto& x : c) inv += 1 / x.speed_kmh, sum += x.speed_kmh;
            CHECK(static_cast<double>(c.size()) / inv <= sum / static_cast<double>(c.size()) + 1e-12);
        }
    }
}

TEST_CASE("query validation") {
    CHECK_THROWS(validate(ProfileQuery{10.0, 5.0, 5.0}));
    CHECK_THROWS(validate(SegmentQuery{10.0, 10.0, 0.0, 0.0, 1.0}));
}

TEST_CASE("report JSON carries raw and truncated values") {
    const std::vector<Trajectory> t{straight(1, 30.0, 100.0), straight(2, 60.0, 300.0)};
    const auto j = report_json(profile_stats(t, {100.0, 0.0, 60.0}));
    CHECK(j["kind"] == "profile");
    CHECK(j["flow"].get<double>() == doctest::Approx(0.03));
    CHECK(j["flow_raw"].get<double>() == doctest::Approx(2.0 / 60.0));
    CHECK(j["average_velocity_kmh"].get<double>() == doctest::Approx(40.0));
    CHECK(format_row(profile_stats(t, {100.0, 0.0, 60.0})) == "2 40.00km/h 0.03 0.0008");
}
