#pragma once

// Seeded scene generators for tests, benchmarks and the acceptance suite.

#include "dasflow/forward_sim.hpp"

#include <cstdint>
#include <string_view>

namespace dasflow::sim {

// "gl8" (5.3 m, 2.5 t), "howo" (17.5 m, 20 t), "faw" (9.6 m, 20 t).
VehicleSpec preset(std::string_view name);

constexpr double kGravity = 9.81;

// Noise sigma giving mean(s^2) / sigma^2 == snr over the noiseless matrix.
double sigma_for_snr(const Scene& scene, double snr);

// 3-8 cars and vans, 65-115 km/h, spaced so that no stripe overtakes another
// inside the fiber span.
Scene simple_scene(std::uint64_t seed, double snr = 10.0);

// A slow and a fast vehicle in different lanes; the fast one overtakes the
// slow one in the middle third of the span.
Scene crossing_scene(std::uint64_t seed, double snr = 10.0);

// Three vehicles entering within a few seconds of each other, one of them
// a truck.
Scene congestion_scene(std::uint64_t seed, double snr = 10.0);

} // namespace dasflow::sim
