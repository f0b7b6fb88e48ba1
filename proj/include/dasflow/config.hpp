#pragma once

// One JSON document holding every stage's parameters. Unknown keys are
// rejected; missing keys keep their defaults.

#include "dasflow/baselines.hpp"
#include "dasflow/detect.hpp"
#include "dasflow/preprocess.hpp"
#include "dasflow/track.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

namespace dasflow {

enum class Colormap { grayscale, heat };

struct RenderSpec {
    Colormap colormap = Colormap::heat;
    bool overlay = true;
    // Unset: matrix extent. Otherwise an integer multiple or divisor of it.
    std::optional<std::size_t> width;
    std::optional<std::size_t> height;
};

struct StatsConfig {
    std::optional<double> profile_position;  // m; default: middle of the span
    double window_length = 60.0;             // s, consecutive profile windows
    std::optional<std::pair<double, double>> segment;  // m; default: whole span
    double segment_interval = 30.0;          // s between segment instants
};

struct BaselineConfig {
    HoughConfig hough;
    RadonConfig radon;
    double tolerance_rows = 20.0;
    double tolerance_kmh = 10.0;
};

struct PipelineConfig {
    DenoiseConfig denoise;
    DetectConfig detect;
    TrackConfig track;
    StatsConfig stats;
    BaselineConfig baseline;
    RenderSpec render;
    std::uint64_t rng_seed = 0;
};

void validate(const PipelineConfig& cfg);

PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::filesystem::path& path);

} // namespace dasflow
