#include "dasflow/config.hpp"

#include "dasflow/errors.hpp"
#include "dasflow/records_io.hpp"

#include <nlohmann/json.hpp>

#include <initializer_list>
#include <string>

namespace dasflow {

namespace {

using nlohmann::json;

void only(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw FormatError("config: '" + where + "' must be an object");
    for (const auto& [k, _] : j.items()) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) throw FormatError("config: unknown key '" + k + "' in '" + where + "'");
    }
}

template <typename T>
void opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

void validate(const PipelineConfig& cfg) {
    validate(cfg.denoise);
    validate(cfg.detect.butterworth);
    if (!(cfg.detect.min_height >= 0.0)) throw std::invalid_argument("config: detect.min_height must be >= 0");
    if (!(cfg.detect.min_separation >= 0.0)) throw std::invalid_argument("config: detect.min_separation must be >= 0");
    validate(cfg.track);
    if (!(cfg.stats.window_length > 0.0)) throw std::invalid_argument("config: stats.window_length must be > 0");
    if (!(cfg.stats.segment_interval > 0.0)) throw std::invalid_argument("config: stats.segment_interval must be > 0");
    if (cfg.stats.segment && !(cfg.stats.segment->second > cfg.stats.segment->first))
        throw std::invalid_argument("config: stats.segment end must exceed start");
    const auto& h = cfg.baseline.hough;
    if (!(h.binarize > 0.0) || h.vote_threshold == 0 || h.theta_bins < 2 || h.rho_bins == 1)
        throw std::invalid_argument("config: invalid hough parameters");
    if (cfg.baseline.radon.angle_count < 2) throw std::invalid_argument("config: radon needs >= 2 angles");
    if (!(cfg.baseline.tolerance_rows >= 0.0 && cfg.baseline.tolerance_kmh >= 0.0))
        throw std::invalid_argument("config: tolerances must be >= 0");
    if ((cfg.render.width && *cfg.render.width == 0) || (cfg.render.height && *cfg.render.height == 0))
        throw std::invalid_argument("config: render size must be > 0");
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    try {
        only(j, {"schema_version", "rng_seed", "denoise", "butterworth", "detect", "track", "stats", "baseline", "render"},
             "root");
        if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1)
            throw FormatError("config: unsupported schema_version");
        opt(j, "rng_seed", c.rng_seed);
        if (j.contains("denoise")) {
            const auto& d = j.at("denoise");
            only(d, {"wavelet", "levels", "threshold_lambda", "mix_a"}, "denoise");
            opt(d, "wavelet", c.denoise.wavelet);
            opt(d, "levels", c.denoise.levels);
            opt(d, "threshold_lambda", c.denoise.threshold);
            opt(d, "mix_a", c.denoise.mix);
        }
        if (j.contains("butterworth")) {
            const auto& b = j.at("butterworth");
            only(b, {"order_N", "cutoff_Wn", "zero_phase"}, "butterworth");
            opt(b, "order_N", c.detect.butterworth.order);
            opt(b, "cutoff_Wn", c.detect.butterworth.cutoff);
            opt(b, "zero_phase", c.detect.butterworth.zero_phase);
        }
        if (j.contains("detect")) {
            const auto& d = j.at("detect");
            only(d, {"min_height", "entry_col", "filter", "min_separation"}, "detect");
            opt(d, "min_height", c.detect.min_height);
            opt(d, "entry_col", c.detect.entry_col);
            opt(d, "filter", c.detect.filter);
            opt(d, "min_separation", c.detect.min_separation);
        }
        if (j.contains("track")) {
            const auto& t = j.at("track");
            only(t, {"v_min_init", "v_max_init", "confidence_cof", "key_interval", "fit_order_M", "fit_window", "max_coast",
                     "amplitude_floor", "direction", "truck_peak", "truck_width"},
                 "track");
            opt(t, "v_min_init", c.track.v_min_init);
            opt(t, "v_max_init", c.track.v_max_init);
            opt(t, "confidence_cof", c.track.cof);
            opt(t, "key_interval", c.track.key_interval);
            opt(t, "fit_order_M", c.track.order);
            opt(t, "fit_window", c.track.fit_window);
            opt(t, "max_coast", c.track.max_coast);
            opt(t, "amplitude_floor", c.track.amplitude_floor);
            opt(t, "direction", c.track.direction);
            opt(t, "truck_peak", c.track.truck_peak);
            opt(t, "truck_width", c.track.truck_width);
        }
        if (j.contains("stats")) {
            const auto& s = j.at("stats");
            only(s, {"profile_position", "window_length", "segment", "segment_interval"}, "stats");
            if (s.contains("profile_position") && !s.at("profile_position").is_null())
                c.stats.profile_position = s.at("profile_position").get<double>();
            opt(s, "window_length", c.stats.window_length);
            if (s.contains("segment") && !s.at("segment").is_null()) {
                const auto seg = s.at("segment").get<std::vector<double>>();
                if (seg.size() != 2) throw FormatError("config: stats.segment must be [start, end]");
                c.stats.segment = std::make_pair(seg[0], seg[1]);
            }
            opt(s, "segment_interval", c.stats.segment_interval);
        }
        if (j.contains("baseline")) {
            const auto& b = j.at("baseline");
            only(b, {"binarize", "vote_threshold", "theta_bins", "rho_bins", "radon_angles", "radon_threshold",
                     "min_kmh", "max_kmh", "full_range", "tolerance_rows", "tolerance_kmh"},
                 "baseline");
            opt(b, "binarize", c.baseline.hough.binarize);
            opt(b, "vote_threshold", c.baseline.hough.vote_threshold);
            opt(b, "theta_bins", c.baseline.hough.theta_bins);
            opt(b, "rho_bins", c.baseline.hough.rho_bins);
            opt(b, "radon_angles", c.baseline.radon.angle_count);
            opt(b, "radon_threshold", c.baseline.radon.relative_threshold);
            opt(b, "full_range", c.baseline.radon.full_range);
            if (b.contains("min_kmh")) c.baseline.hough.min_kmh = c.baseline.radon.min_kmh = b.at("min_kmh").get<double>();
            if (b.contains("max_kmh")) c.baseline.hough.max_kmh = c.baseline.radon.max_kmh = b.at("max_kmh").get<double>();
            opt(b, "tolerance_rows", c.baseline.tolerance_rows);
            opt(b, "tolerance_kmh", c.baseline.tolerance_kmh);
        }
        if (j.contains("render")) {
            const auto& r = j.at("render");
            only(r, {"colormap", "overlay", "width", "height"}, "render");
            if (r.contains("colormap")) {
                const auto name = r.at("colormap").get<std::string>();
                if (name == "grayscale") c.render.colormap = Colormap::grayscale;
                else if (name == "heat") c.render.colormap = Colormap::heat;
                else throw FormatError("config: unknown colormap '" + name + "'");
            }
            opt(r, "overlay", c.render.overlay);
            if (r.contains("width") && !r.at("width").is_null()) c.render.width = r.at("width").get<std::size_t>();
            if (r.contains("height") && !r.at("height").is_null()) c.render.height = r.at("height").get<std::size_t>();
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("config: ") + e.what());
    }
    validate(c);
    return c;
}

json config_to_json(const PipelineConfig& c) {
    json j;
    j["schema_version"] = 1;
    j["rng_seed"] = c.rng_seed;
    j["denoise"] = {{"wavelet", c.denoise.wavelet},
                    {"levels", c.denoise.levels},
                    {"threshold_lambda", c.denoise.threshold},
                    {"mix_a", c.denoise.mix}};
    j["butterworth"] = {{"order_N", c.detect.butterworth.order},
                        {"cutoff_Wn", c.detect.butterworth.cutoff},
                        {"zero_phase", c.detect.butterworth.zero_phase}};
    j["detect"] = {{"min_height", c.detect.min_height}, {"entry_col", c.detect.entry_col}, {"filter", c.detect.filter},
                   {"min_separation", c.detect.min_separation}};
    j["track"] = {{"v_min_init", c.track.v_min_init},     {"v_max_init", c.track.v_max_init},
                  {"confidence_cof", c.track.cof},        {"key_interval", c.track.key_interval},
                  {"fit_order_M", c.track.order},
                  {"fit_window", c.track.fit_window},     {"max_coast", c.track.max_coast},
                  {"amplitude_floor", c.track.amplitude_floor}, {"direction", c.track.direction},
                  {"truck_peak", c.track.truck_peak},     {"truck_width", c.track.truck_width}};
    j["stats"] = {{"profile_position", c.stats.profile_position ? json(*c.stats.profile_position) : json(nullptr)},
                  {"window_length", c.stats.window_length},
                  {"segment", c.stats.segment ? json{c.stats.segment->first, c.stats.segment->second} : json(nullptr)},
                  {"segment_interval", c.stats.segment_interval}};
    j["baseline"] = {{"binarize", c.baseline.hough.binarize},
                     {"vote_threshold", c.baseline.hough.vote_threshold},
                     {"theta_bins", c.baseline.hough.theta_bins},
                     {"rho_bins", c.baseline.hough.rho_bins},
                     {"radon_angles", c.baseline.radon.angle_count},
                     {"radon_threshold", c.baseline.radon.relative_threshold},
                     {"min_kmh", c.baseline.hough.min_kmh},
                     {"max_kmh", c.baseline.hough.max_kmh},
                     {"full_range", c.baseline.radon.full_range},
                     {"tolerance_rows", c.baseline.tolerance_rows},
                     {"tolerance_kmh", c.baseline.tolerance_kmh}};
    j["render"] = {{"colormap", c.render.colormap == Colormap::heat ? "heat" : "grayscale"},
                   {"overlay", c.render.overlay},
                   {"width", c.render.width ? json(*c.render.width) : json(nullptr)},
                   {"height", c.render.height ? json(*c.render.height) : json(nullptr)}};
    return j;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("config: ") + e.what());
    }
    return config_from_json(j);
}

} // namespace dasflow
