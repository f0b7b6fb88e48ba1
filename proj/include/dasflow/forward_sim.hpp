#pragma once

// Quasi-static half-space response of a buried fiber to vehicle loads, and a
// multi-vehicle waterfall synthesizer with known ground truth.

#include "dasflow/waterfall.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dasflow::sim {

struct Medium {
    double shear_modulus = 1e7;  // G [Pa]
    double poisson_ratio = 0.25; // nu
};

struct FiberLayout {
    double depth = 0.05;            // d_z [m]
    double channel_spacing = 0.4;   // [m]
    std::size_t channel_count = 800;
    double gauge_length = 10.0;     // l [m]
    double row_dt = 0.05;           // [s]

    double span() const noexcept {
        return static_cast<double>(channel_count - 1) * channel_spacing;
    }
};

struct VehicleSpec {
    double load = 2.0e4;                                  // total force F [N]
    std::array<double, 4> wheel_weights{0.25, 0.25, 0.25, 0.25};
    double front_track = 1.8;                             // a [m]
    double length = 4.5;                                  // b [m]
    double lateral_offset = 3.0;                          // d_y [m]
    double entry_time = 0.0;                              // time at entry_position [s]
    double entry_position = 0.0;                          // [m]
    double velocity = 25.0;                               // signed [m/s]

    double position_at(double t) const noexcept {
        return entry_position + velocity * (t - entry_time);
    }
};

struct Scene {
    Medium medium;
    FiberLayout fiber;
    std::vector<VehicleSpec> vehicles;
    double duration = 100.0;  // [s]
    double noise_sigma = 0.0; // model units
    std::uint64_t rng_seed = 0;
};

struct VehicleTruth {
    std::size_t vehicle_id = 0;  // 1-based, scene order
    double velocity = 0.0;       // [m/s]
    // Rows whose true center lies inside the fiber span, with the fractional
    // column of that center.
    std::vector<std::pair<std::size_t, double>> positions;

    std::optional<std::size_t> entry_row() const {
        if (positions.empty()) return std::nullopt;
        return positions.front().first;
    }
    std::optional<std::size_t> exit_row() const {
        if (positions.empty()) return std::nullopt;
        return positions.back().first;
    }
    // True column at `row`, if the vehicle is inside the span then.
    std::optional<double> column_at(std::size_t row) const;
};

struct GroundTruth {
    std::vector<VehicleTruth> vehicles;
};

struct Synthesis {
    WaterfallMatrix matrix;
    GroundTruth truth;
};

void validate(const Medium& m);
void validate(const FiberLayout& f);
void validate(const VehicleSpec& v);
void validate(const Scene& s);

// P(d_x, d_y, d_z): Flamant-Boussinesq deformation for total force `load`.
double quasi_static_deformation(double load, const Medium& medium, double dx, double dy, double dz);

// Gauge-length difference of P across [d_x - l/2, d_x + l/2], divided by l.
double gauge_response(double load, const Medium& medium, double dx, double dy, double dz,
                      double gauge_length);

// Four-wheel response |k_x2 - k_x1| at sensor offset `sensor_dx` from the
// vehicle center.
double vehicle_response(const VehicleSpec& v, const Medium& medium, const FiberLayout& fiber,
                        double sensor_dx);

// Largest vehicle_response over sensor offsets in [-range, range] on a `step` grid.
double peak_response(const VehicleSpec& v, const Medium& medium, const FiberLayout& fiber,
                     double range = 40.0, double step = 0.05);

// Number of rows ceil(duration / row_dt).
std::size_t row_count(const Scene& scene);

Synthesis synthesize_waterfall(const Scene& scene);

// Standard normal deviate derived from (seed, row, col) only.
double cell_noise(std::uint64_t seed, std::size_t row, std::size_t col) noexcept;

// Scene files and ground-truth CSV.
Scene scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const Scene& scene);
Scene load_scene(const std::filesystem::path& path);
void save_scene(const Scene& scene, const std::filesystem::path& path);

// Columns: vehicle_id,row,true_col,true_velocity_mps
std::string ground_truth_csv(const GroundTruth& truth);
void save_ground_truth(const GroundTruth& truth, const std::filesystem::path& path);
GroundTruth load_ground_truth(const std::filesystem::path& path);

} // namespace dasflow::sim
