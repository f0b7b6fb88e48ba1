#include "dasflow/render.hpp"

#include "dasflow/records_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace dasflow {

namespace {

std::uint8_t byte(double unit) {
    return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(unit, 0.0, 1.0)));
}

struct Axis {
    std::size_t out;
    std::size_t up = 1;    // output pixels per source sample
    std::size_t down = 1;  // source samples per output pixel
};

Axis make_axis(std::size_t extent, std::optional<std::size_t> requested, const char* name) {
    const std::size_t out = requested.value_or(extent);
    if (out == 0) throw std::invalid_argument(std::string("render: zero ") + name);
    Axis a{out};
    if (out >= extent && out % extent == 0) a.up = out / extent;
    else if (out < extent && extent % out == 0) a.down = extent / out;
    else throw std::invalid_argument(std::string("render: ") + name + " must be an integer multiple or divisor of the matrix extent");
    return a;
}

} // namespace

std::array<std::uint8_t, 3> colormap(Colormap map, double a) {
    if (map == Colormap::grayscale) {
        const auto g = byte(a);
        return {g, g, g};
    }
    return {byte(3.0 * a), byte(3.0 * a - 1.0), byte(3.0 * a - 2.0)};
}

std::array<std::uint8_t, 3> overlay_color(std::size_t index) {
    static constexpr std::array<std::array<std::uint8_t, 3>, 8> kPalette{{{0, 255, 255},
                                                                          {255, 0, 255},
                                                                          {0, 255, 0},
                                                                          {0, 128, 255},
                                                                          {255, 128, 0},
                                                                          {128, 0, 255},
                                                                          {0, 255, 128},
                                                                          {255, 0, 128}}};
    return kPalette[index % kPalette.size()];
}

std::vector<std::pair<long, long>> bresenham(long x0, long y0, long x1, long y1) {
    std::vector<std::pair<long, long>> pts;
    const long dx = std::labs(x1 - x0), dy = -std::labs(y1 - y0);
    const long sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    long err = dx + dy;
    while (true) {
        pts.emplace_back(x0, y0);
        if (x0 == x1 && y0 == y1) break;
        const long e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
    return pts;
}

Image render_image(const WaterfallMatrix& m, std::span<const Trajectory> trajs, const RenderSpec& spec) {
    const Axis ax = make_axis(m.cols(), spec.width, "width");
    const Axis ay = make_axis(m.rows(), spec.height, "height");
    Image img{ax.out, ay.out, std::vector<std::uint8_t>(3 * ax.out * ay.out)};

    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            double v;
            if (ax.down == 1 && ay.down == 1) {
                v = m.at(y / ay.up, x / ax.up);
            } else {
                v = -std::numeric_limits<double>::infinity();
                const std::size_t r0 = (y / ay.up) * ay.down, c0 = (x / ax.up) * ax.down;
                for (std::size_t r = r0; r < r0 + ay.down; ++r)
                    for (std::size_t c = c0; c < c0 + ax.down; ++c) v = std::max(v, m.at(r, c));
            }
            const auto rgb = colormap(spec.colormap, v);
            std::copy(rgb.begin(), rgb.end(), img.rgb.begin() + static_cast<std::ptrdiff_t>(3 * (y * img.width + x)));
        }
    }
    if (!spec.overlay) return img;

    auto to_px = [&](double col, double row) {
        const double px = col * static_cast<double>(ax.up) / static_cast<double>(ax.down);
        const double py = row * static_cast<double>(ay.up) / static_cast<double>(ay.down);
        return std::make_pair(std::lround(std::floor(px + 0.5)), std::lround(std::floor(py + 0.5)));
    };
    for (std::size_t k = 0; k < trajs.size(); ++k) {
        const auto& t = trajs[k];
        if (t.points.empty() || t.coeffs.empty()) continue;
        // Straight fits need only their endpoints; curved fits go through every key-point row.
        std::vector<double> rows;
        if (t.coeffs.size() <= 2) rows = {static_cast<double>(t.first_row()), static_cast<double>(t.last_row())};
        else
            for (const auto& p : t.points) rows.push_back(static_cast<double>(p.row));
        const auto color = overlay_color(k);
        auto prev = to_px(t.column_at(rows.front()), rows.front());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto next = to_px(t.column_at(rows[i]), rows[i]);
            for (const auto& [x, y] : bresenham(prev.first, prev.second, next.first, next.second)) {
                if (x < 0 || y < 0 || x >= static_cast<long>(img.width) || y >= static_cast<long>(img.height)) continue;
                const std::size_t idx = 3 * (static_cast<std::size_t>(y) * img.width + static_cast<std::size_t>(x));
                std::copy(color.begin(), color.end(), img.rgb.begin() + static_cast<std::ptrdiff_t>(idx));
            }
            prev = next;
        }
    }
    return img;
}

std::string ppm_bytes(const Image& img) {
    std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(img.rgb.data()), img.rgb.size());
    return out;
}

nlohmann::json legend_json(std::span<const Trajectory> trajs, const RenderSpec& spec, const Image& img) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["width"] = img.width;
    j["height"] = img.height;
    j["colormap"] = spec.colormap == Colormap::heat ? "heat" : "grayscale";
    auto list = nlohmann::json::array();
    if (spec.overlay)
        for (std::size_t k = 0; k < trajs.size(); ++k) {
            const auto c = overlay_color(k);
            list.push_back({{"vehicle_id", trajs[k].vehicle_id}, {"color", {c[0], c[1], c[2]}}});
        }
    j["trajectories"] = list;
    return j;
}

void render(const WaterfallMatrix& m, std::span<const Trajectory> trajs, const RenderSpec& spec,
            const std::filesystem::path& path) {
    const auto img = render_image(m, trajs, spec);
    write_text(path, ppm_bytes(img));
    write_text(path.string() + ".legend.json", legend_json(trajs, spec, img).dump(2) + "\n");
}

} // namespace dasflow
