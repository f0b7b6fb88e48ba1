#include "dasflow/forward_sim.hpp"

#include "dasflow/errors.hpp"
#include "dasflow/kernels.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

namespace dasflow::sim {

namespace {

constexpr std::array<double, 4> kAlongSign{+1.0, +1.0, -1.0, -1.0};
constexpr std::array<double, 4> kAcrossSign{+1.0, -1.0, -1.0, +1.0};

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

kernels::WheelSet wheel_set(const VehicleSpec& v, const Medium& medium, const FiberLayout& fiber) {
    kernels::WheelSet w;
    w.scale = v.load / (4.0 * std::numbers::pi * medium.shear_modulus);
    w.poisson_term = 2.0 * medium.poisson_ratio - 1.0;
    w.depth = fiber.depth;
    w.half_gauge = fiber.gauge_length / 2.0;
    for (int i = 0; i < 4; ++i) {
        w.along[i] = kAlongSign[i] * v.length / 2.0;
        w.across[i] = v.lateral_offset + kAcrossSign[i] * v.front_track / 2.0;
        w.weight[i] = v.wheel_weights[i];
    }
    return w;
}

} // namespace

std::optional<double> VehicleTruth::column_at(std::size_t row) const {
    auto it = std::lower_bound(positions.begin(), positions.end(), row,
                               [](const auto& p, std::size_t r) { return p.first < r; });
    if (it == positions.end() || it->first != row) return std::nullopt;
    return it->second;
}

void validate(const Medium& m) {
    if (!(m.shear_modulus > 0.0)) throw std::invalid_argument("medium: shear modulus must be > 0");
    if (!(m.poisson_ratio >= 0.0 && m.poisson_ratio < 0.5))
        throw std::invalid_argument("medium: Poisson ratio must be in [0, 0.5)");
}

void validate(const FiberLayout& f) {
    if (!(f.depth > 0.0)) throw std::invalid_argument("fiber: depth must be > 0");
    if (!(f.channel_spacing > 0.0)) throw std::invalid_argument("fiber: channel spacing must be > 0");
    if (f.channel_count < 1) throw std::invalid_argument("fiber: channel count must be >= 1");
    if (!(f.gauge_length > 0.0)) throw std::invalid_argument("fiber: gauge length must be > 0");
    if (!(f.row_dt > 0.0)) throw std::invalid_argument("fiber: row dt must be > 0");
}

void validate(const VehicleSpec& v) {
    if (!(v.load > 0.0)) throw std::invalid_argument("vehicle: load must be > 0");
    if (!(v.front_track > 0.0)) throw std::invalid_argument("vehicle: front track must be > 0");
    if (!(v.length > 0.0)) throw std::invalid_argument("vehicle: length must be > 0");
    double sum = 0.0;
    for (double w : v.wheel_weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("vehicle: wheel weights must be non-negative");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-12) throw std::invalid_argument("vehicle: wheel weights must sum to 1");
    if (!std::isfinite(v.entry_time) || !std::isfinite(v.entry_position) || !std::isfinite(v.velocity) ||
        !std::isfinite(v.lateral_offset))
        throw std::invalid_argument("vehicle: non-finite kinematics");
}

void validate(const Scene& s) {
    validate(s.medium);
    validate(s.fiber);
    for (const auto& v : s.vehicles) validate(v);
    if (!(s.duration > 0.0)) throw std::invalid_argument("scene: duration must be > 0");
    if (!(s.noise_sigma >= 0.0)) throw std::invalid_argument("scene: noise sigma must be >= 0");
}

double quasi_static_deformation(double load, const Medium& medium, double dx, double dy, double dz) {
    if (!(dz > 0.0)) throw std::invalid_argument("quasi_static_deformation: depth must be > 0");
    const double r2 = dx * dx + dy * dy + dz * dz;
    if (r2 == 0.0) throw NumericError("quasi_static_deformation: singular point r = 0");
    const double r = std::sqrt(r2);
    const double q = dz / r;
    const double p = (dx / r2) * (q + (2.0 * medium.poisson_ratio - 1.0) / (1.0 + q));
    return load / (4.0 * std::numbers::pi * medium.shear_modulus) * p;
}

double gauge_response(double load, const Medium& medium, double dx, double dy, double dz,
                      double gauge_length) {
    if (!(gauge_length > 0.0)) throw std::invalid_argument("gauge_response: gauge length must be > 0");
    const double half = gauge_length / 2.0;
    return (quasi_static_deformation(load, medium, dx + half, dy, dz) -
            quasi_static_deformation(load, medium, dx - half, dy, dz)) /
           gauge_length;
}

double vehicle_response(const VehicleSpec& v, const Medium& medium, const FiberLayout& fiber,
                        double sensor_dx) {
    const double half = fiber.gauge_length / 2.0;
    double front = 0.0; // k_x1
    double rear = 0.0;  // k_x2
    for (int i = 0; i < 4; ++i) {
        const double along = kAlongSign[i] * v.length / 2.0;
        const double across = v.lateral_offset + kAcrossSign[i] * v.front_track / 2.0;
        front += v.wheel_weights[i] *
                 quasi_static_deformation(v.load, medium, sensor_dx + half + along, across, fiber.depth);
        rear += v.wheel_weights[i] *
                quasi_static_deformation(v.load, medium, sensor_dx - half + along, across, fiber.depth);
    }
    return std::fabs(rear - front);
}

double peak_response(const VehicleSpec& v, const Medium& medium, const FiberLayout& fiber,
                     double range, double step) {
    const auto count = static_cast<std::size_t>(std::floor(2.0 * range / step)) + 1;
    std::vector<double> out(count, 0.0);
    kernels::vehicle_response(wheel_set(v, medium, fiber), -range, step, out);
    return *std::max_element(out.begin(), out.end());
}

std::size_t row_count(const Scene& scene) {
    const double rows = std::ceil(scene.duration / scene.fiber.row_dt - 1e-9);
    return static_cast<std::size_t>(std::max(1.0, rows));
}

double cell_noise(std::uint64_t seed, std::size_t row, std::size_t col) noexcept {
    const std::uint64_t key = splitmix64(seed) ^ splitmix64((static_cast<std::uint64_t>(row) << 32) ^
                                                            static_cast<std::uint64_t>(col));
    const std::uint64_t a = splitmix64(key);
    const std::uint64_t b = splitmix64(key ^ 0xD1B54A32D192ED03ull);
    // u1 in (0, 1], u2 in [0, 1)
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Synthesis synthesize_waterfall(const Scene& scene) {
    validate(scene);
    const auto& fiber = scene.fiber;
    const std::size_t rows = row_count(scene);
    const std::size_t cols = fiber.channel_count;
    const double x0 = 0.0;
    const double span = fiber.span();

    std::vector<kernels::WheelSet> wheels;
    GroundTruth truth;
    for (std::size_t k = 0; k < scene.vehicles.size(); ++k) {
        wheels.push_back(wheel_set(scene.vehicles[k], scene.medium, fiber));
        truth.vehicles.push_back({k + 1, scene.vehicles[k].velocity, {}});
    }

    std::vector<double> values(rows * cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double t = static_cast<double>(r) * fiber.row_dt;
        std::span<double> row(values.data() + r * cols, cols);
        for (std::size_t k = 0; k < scene.vehicles.size(); ++k) {
            const auto& v = scene.vehicles[k];
            const double center = v.position_at(t);
            if (center >= x0 && center <= x0 + span)
                truth.vehicles[k].positions.emplace_back(r, (center - x0) / fiber.channel_spacing);
            if (center < x0 - v.length || center > x0 + span + v.length) continue;
            kernels::vehicle_response(wheels[k], x0 - center, fiber.channel_spacing, row);
        }
        if (scene.noise_sigma > 0.0) {
            for (std::size_t c = 0; c < cols; ++c)
                row[c] = std::fabs(row[c] + scene.noise_sigma * cell_noise(scene.rng_seed, r, c));
        }
    }

    Sampling s;
    s.dt = fiber.row_dt;
    s.dx = fiber.channel_spacing;
    s.t0 = 0.0;
    s.x0 = x0;
    s.gauge_length = fiber.gauge_length;
    return {WaterfallMatrix(rows, cols, std::move(values), s), std::move(truth)};
}

// ---------------------------------------------------------------------------
// Scene JSON

namespace {

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> keys, const char* where) {
    for (const auto& [k, _] : j.items()) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) throw FormatError(std::string("scene: unknown key '") + k + "' in " + where);
    }
}

} // namespace

Scene scene_from_json(const nlohmann::json& j) {
    Scene s;
    try {
        reject_unknown(j, {"schema_version", "medium", "fiber", "vehicles", "duration", "noise_sigma", "rng_seed"},
                       "scene");
        if (j.contains("medium")) {
            const auto& m = j.at("medium");
            reject_unknown(m, {"shear_modulus_G", "poisson_nu"}, "medium");
            read_opt(m, "shear_modulus_G", s.medium.shear_modulus);
            read_opt(m, "poisson_nu", s.medium.poisson_ratio);
        }
        if (j.contains("fiber")) {
            const auto& f = j.at("fiber");
            reject_unknown(f, {"depth_dz", "channel_spacing_dx", "channel_count", "gauge_length_l", "row_dt"},
                           "fiber");
            read_opt(f, "depth_dz", s.fiber.depth);
            read_opt(f, "channel_spacing_dx", s.fiber.channel_spacing);
            read_opt(f, "channel_count", s.fiber.channel_count);
            read_opt(f, "gauge_length_l", s.fiber.gauge_length);
            read_opt(f, "row_dt", s.fiber.row_dt);
        }
        if (j.contains("vehicles")) {
            for (const auto& v : j.at("vehicles")) {
                reject_unknown(v, {"load_F", "wheel_weights_w", "front_track_a", "length_b", "lateral_offset_dy",
                                   "entry_time", "entry_position", "velocity"},
                               "vehicle");
                VehicleSpec spec;
                read_opt(v, "load_F", spec.load);
                read_opt(v, "wheel_weights_w", spec.wheel_weights);
                read_opt(v, "front_track_a", spec.front_track);
                read_opt(v, "length_b", spec.length);
                read_opt(v, "lateral_offset_dy", spec.lateral_offset);
                read_opt(v, "entry_time", spec.entry_time);
                read_opt(v, "entry_position", spec.entry_position);
                read_opt(v, "velocity", spec.velocity);
                s.vehicles.push_back(spec);
            }
        }
        read_opt(j, "duration", s.duration);
        read_opt(j, "noise_sigma", s.noise_sigma);
        read_opt(j, "rng_seed", s.rng_seed);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("scene: ") + e.what());
    }
    validate(s);
    return s;
}

nlohmann::json scene_to_json(const Scene& s) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["medium"] = {{"shear_modulus_G", s.medium.shear_modulus}, {"poisson_nu", s.medium.poisson_ratio}};
    j["fiber"] = {{"depth_dz", s.fiber.depth},
                  {"channel_spacing_dx", s.fiber.channel_spacing},
                  {"channel_count", s.fiber.channel_count},
                  {"gauge_length_l", s.fiber.gauge_length},
                  {"row_dt", s.fiber.row_dt}};
    auto vehicles = nlohmann::ordered_json::array();
    for (const auto& v : s.vehicles) {
        vehicles.push_back({{"load_F", v.load},
                            {"wheel_weights_w", v.wheel_weights},
                            {"front_track_a", v.front_track},
                            {"length_b", v.length},
                            {"lateral_offset_dy", v.lateral_offset},
                            {"entry_time", v.entry_time},
                            {"entry_position", v.entry_position},
                            {"velocity", v.velocity}});
    }
    j["vehicles"] = vehicles;
    j["duration"] = s.duration;
    j["noise_sigma"] = s.noise_sigma;
    j["rng_seed"] = s.rng_seed;
    return nlohmann::json::parse(j.dump());
}

Scene load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("scene: " + std::string(e.what()));
    }
    return scene_from_json(j);
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << scene_to_json(scene).dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

std::string ground_truth_csv(const GroundTruth& truth) {
    std::string out = "vehicle_id,row,true_col,true_velocity_mps\n";
    char buf[128];
    for (const auto& v : truth.vehicles) {
        for (const auto& [row, col] : v.positions) {
            std::snprintf(buf, sizeof(buf), "%zu,%zu,%.6f,%.6f\n", v.vehicle_id, row, col, v.velocity);
            out += buf;
        }
    }
    return out;
}

void save_ground_truth(const GroundTruth& truth, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << ground_truth_csv(truth);
    if (!out) throw IoError("write failed: " + path.string());
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw FormatError("ground truth: empty file");
    std::map<std::size_t, VehicleTruth> byId;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::istringstream ss(line);
        std::string f[4];
        for (auto& field : f)
            if (!std::getline(ss, field, ','))
                throw FormatError("ground truth: short row on line " + std::to_string(line_no));
        try {
            const std::size_t id = std::stoul(f[0]);
            auto& v = byId[id];
            v.vehicle_id = id;
            v.velocity = std::stod(f[3]);
            v.positions.emplace_back(std::stoul(f[1]), std::stod(f[2]));
        } catch (const std::exception&) {
            throw FormatError("ground truth: malformed row on line " + std::to_string(line_no));
        }
    }
    GroundTruth truth;
    for (auto& [id, v] : byId) {
        std::sort(v.positions.begin(), v.positions.end());
        truth.vehicles.push_back(std::move(v));
    }
    return truth;
}

} // namespace dasflow::sim
