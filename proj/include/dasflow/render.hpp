#pragma once

#include "dasflow/config.hpp"
#include "dasflow/track.hpp"
#include "dasflow/waterfall.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dasflow {

struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

    std::array<std::uint8_t, 3> pixel(std::size_t x, std::size_t y) const {
        const std::size_t i = 3 * (y * width + x);
        return {rgb[i], rgb[i + 1], rgb[i + 2]};
    }
};

std::array<std::uint8_t, 3> colormap(Colormap map, double amplitude);
std::array<std::uint8_t, 3> overlay_color(std::size_t index);

// Integer line from (x0, y0) to (x1, y1), both ends included.
std::vector<std::pair<long, long>> bresenham(long x0, long y0, long x1, long y1);

// Throws std::invalid_argument for zero or non-integer-ratio sizes. Downscaling
// keeps the block maximum.
Image render_image(const WaterfallMatrix& m, std::span<const Trajectory> trajs, const RenderSpec& spec);

std::string ppm_bytes(const Image& img);
nlohmann::json legend_json(std::span<const Trajectory> trajs, const RenderSpec& spec, const Image& img);

// Writes `path` (binary PPM) and `path`.legend.json.
void render(const WaterfallMatrix& m, std::span<const Trajectory> trajs, const RenderSpec& spec,
            const std::filesystem::path& path);

} // namespace dasflow
