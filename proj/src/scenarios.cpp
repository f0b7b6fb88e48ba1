#include "dasflow/scenarios.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace dasflow::sim {

namespace {

constexpr double kMps = 1.0 / 3.6;

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

VehicleSpec random_car(std::mt19937_64& rng) {
    VehicleSpec v;
    v.length = uniform(rng, 3.5, 6.0);
    v.load = uniform(rng, 1.2e4, 3.0e4);
    v.front_track = uniform(rng, 1.5, 1.9);
    v.lateral_offset = uniform(rng, 2.5, 4.0);
    return v;
}

Scene base_scene(std::uint64_t seed) {
    Scene s;
    s.duration = 100.0;
    s.rng_seed = seed;
    return s;
}

void apply_snr(Scene& s, double snr) {
    s.noise_sigma = snr > 0.0 && std::isfinite(snr) ? sigma_for_snr(s, snr) : 0.0;
}

} // namespace

VehicleSpec preset(std::string_view name) {
    VehicleSpec v;
    if (name == "gl8") {
        v.length = 5.3;
        v.load = 2.5e3 * kGravity;
        v.front_track = 1.6;
    } else if (name == "howo") {
        v.length = 17.5;
        v.load = 20e3 * kGravity;
        v.front_track = 2.0;
    } else if (name == "faw") {
        v.length = 9.6;
        v.load = 20e3 * kGravity;
        v.front_track = 2.0;
    } else {
        throw std::invalid_argument("unknown vehicle preset '" + std::string(name) + "'");
    }
    return v;
}

double sigma_for_snr(const Scene& scene, double snr) {
    if (!(snr > 0.0)) throw std::invalid_argument("snr must be > 0");
    Scene clean = scene;
    clean.noise_sigma = 0.0;
    const auto syn = synthesize_waterfall(clean);
    double power = 0.0;
    for (double v : syn.matrix.values()) power += v * v;
    power /= static_cast<double>(syn.matrix.values().size());
    return std::sqrt(power / snr);
}

Scene simple_scene(std::uint64_t seed, double snr) {
    std::mt19937_64 rng(seed);
    Scene s = base_scene(seed);
    const int count = std::uniform_int_distribution<int>(3, 8)(rng);
    const double span = s.fiber.span();
    double t = uniform(rng, 2.0, 6.0);
    double prev_speed = 0.0;
    for (int i = 0; i < count; ++i) {
        VehicleSpec v = random_car(rng);
        v.velocity = uniform(rng, 65.0, 115.0) * kMps;
        if (i > 0) {
            // Leader clears the far end before the follower gets there.
            const double gap = std::max(uniform(rng, 6.0, 10.0), span / prev_speed - span / v.velocity + 4.0);
            if (t + gap > s.duration - 20.0) break;
            t += gap;
        }
        v.entry_time = t;
        v.entry_position = 0.0;
        prev_speed = v.velocity;
        s.vehicles.push_back(v);
    }
    apply_snr(s, snr);
    return s;
}

Scene crossing_scene(std::uint64_t seed, double snr) {
    std::mt19937_64 rng(seed ^ 0xC0FFEEull);
    Scene s = base_scene(seed);
    const double span = s.fiber.span();
    VehicleSpec slow = random_car(rng);
    VehicleSpec fast = random_car(rng);
    slow.lateral_offset = uniform(rng, 3.5, 4.5);
    fast.lateral_offset = uniform(rng, 1.5, 2.5);
    slow.velocity = uniform(rng, 65.0, 75.0) * kMps;
    fast.velocity = uniform(rng, 100.0, 115.0) * kMps;
    slow.entry_time = uniform(rng, 5.0, 15.0);
    const double meet = uniform(rng, span / 3.0, 2.0 * span / 3.0);
    fast.entry_time = slow.entry_time + meet / slow.velocity - meet / fast.velocity;
    s.vehicles = {slow, fast};
    apply_snr(s, snr);
    return s;
}

Scene congestion_scene(std::uint64_t seed, double snr) {
    std::mt19937_64 rng(seed ^ 0xBADC0DEull);
    Scene s = base_scene(seed);
    VehicleSpec truck = preset("faw");
    truck.lateral_offset = uniform(rng, 3.5, 4.5);
    truck.velocity = uniform(rng, 70.0, 85.0) * kMps;
    VehicleSpec a = random_car(rng);
    VehicleSpec b = random_car(rng);
    a.velocity = uniform(rng, 85.0, 100.0) * kMps;
    b.velocity = uniform(rng, 75.0, 95.0) * kMps;
    double t = uniform(rng, 5.0, 10.0);
    truck.entry_time = t;
    t += uniform(rng, 2.5, 4.0);
    a.entry_time = t;
    t += uniform(rng, 2.5, 4.0);
    b.entry_time = t;
    s.vehicles = {truck, a, b};
    apply_snr(s, snr);
    return s;
}

} // namespace dasflow::sim
