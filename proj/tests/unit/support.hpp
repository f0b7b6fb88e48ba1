#pragma once

#include "dasflow/forward_sim.hpp"
#include "dasflow/waterfall.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

namespace support {

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("dasflow-" + tag + "-" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

inline dasflow::WaterfallMatrix matrix(std::size_t rows, std::size_t cols, std::vector<double> v,
                                       double dt = 1.0, double dx = 1.0) {
    dasflow::Sampling s;
    s.dt = dt;
    s.dx = dx;
    return dasflow::WaterfallMatrix(rows, cols, std::move(v), s);
}

// Values on the float grid so the binary format round-trips exactly.
inline dasflow::WaterfallMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> u(-2.0f, 2.0f);
    std::vector<double> v(rows * cols);
    for (auto& x : v) x = static_cast<double>(u(rng));
    return matrix(rows, cols, std::move(v), 0.05, 0.4);
}

inline dasflow::sim::Scene noiseless(dasflow::sim::Scene s) {
    s.noise_sigma = 0.0;
    return s;
}

// One vehicle entering the fiber at `entry_time` with speed `kmh`.
inline dasflow::sim::Scene single_vehicle(double kmh, double entry_time = 5.0, double duration = 30.0) {
    dasflow::sim::Scene s;
    s.duration = duration;
    dasflow::sim::VehicleSpec v;
    v.velocity = kmh / 3.6;
    v.entry_time = entry_time;
    s.vehicles.push_back(v);
    return s;
}

} // namespace support
