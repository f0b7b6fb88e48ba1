#include "dasflow/pipeline.hpp"

#include "dasflow/baselines.hpp"
#include "dasflow/preprocess.hpp"
#include "dasflow/records_io.hpp"
#include "dasflow/render.hpp"
#include "dasflow/traffic_stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <system_error>
#include <unistd.h>

namespace dasflow {

std::string_view stage_name(Stage s) noexcept {
    switch (s) {
    case Stage::config: return "config";
    case Stage::load: return "load";
    case Stage::preprocess: return "preprocess";
    case Stage::detect: return "detect";
    case Stage::track: return "track";
    case Stage::stats: return "stats";
    case Stage::render: return "render";
    case Stage::sim: return "sim";
    case Stage::write: return "write";
    }
    return "unknown";
}

namespace {

template <class F>
auto stage(Stage s, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(s, e.what());
    }
}

bool is_scene(const std::filesystem::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".json";
}

nlohmann::json traffic_report(const WaterfallMatrix& m, std::span<const Trajectory> trajs, const StatsConfig& cfg) {
    const double t_begin = m.t0();
    const double t_end = m.t0() + static_cast<double>(m.rows()) * m.dt();
    const double x_begin = m.x0();
    const double x_end = m.x0() + static_cast<double>(m.cols() - 1) * m.dx();

    nlohmann::json j;
    j["schema_version"] = 1;
    auto profiles = nlohmann::json::array();
    const double position = cfg.profile_position.value_or(0.5 * (x_begin + x_end));
    for (double a = t_begin; a < t_end - 1e-9; a += cfg.window_length) {
        ProfileQuery q{position, a, std::min(a + cfg.window_length, t_end)};
        profiles.push_back(report_json(profile_stats(trajs, q)));
    }
    auto segments = nlohmann::json::array();
    const auto seg = cfg.segment.value_or(std::make_pair(x_begin, x_end));
    for (double t = t_begin; t < t_end - 1e-9; t += cfg.segment_interval) {
        SegmentQuery q{seg.first, seg.second, t, t, 1.0};
        segments.push_back(report_json(segment_stats(trajs, q)));
    }
    j["profile"] = profiles;
    j["segment"] = segments;
    return j;
}

} // namespace

Bundle run_pipeline(const std::filesystem::path& input, const PipelineConfig& cfg, std::optional<std::uint64_t> seed) {
    stage(Stage::config, [&] { validate(cfg); });
    std::map<std::string, std::string> files;
    std::optional<sim::GroundTruth> truth;

    WaterfallMatrix raw = [&] {
        if (!is_scene(input)) return stage(Stage::load, [&] { return load_waterfall(input, format_for_path(input)); });
        auto scene = stage(Stage::load, [&] { return sim::load_scene(input); });
        if (seed) scene.rng_seed = *seed;
        auto syn = stage(Stage::sim, [&] { return sim::synthesize_waterfall(scene); });
        truth = std::move(syn.truth);
        files["input.dasw"] = encode_dasw(syn.matrix);
        files["truth.csv"] = sim::ground_truth_csv(*truth);
        return std::move(syn.matrix);
    }();

    auto [normalized, denoised] = stage(Stage::preprocess, [&] {
        auto n = minmax_normalize(raw);
        auto d = wavelet_denoise(n, cfg.denoise);
        return std::make_pair(std::move(n), std::move(d));
    });
    files["denoised.dasw"] = encode_dasw(denoised);
    files["quality.json"] = quality_json(quality_metrics(normalized, denoised)).dump(2) + "\n";

    auto events = stage(Stage::detect, [&] { return detect_entries(denoised, cfg.detect); });
    files["events.csv"] = events_csv(events, denoised.sampling());

    auto trajs = stage(Stage::track, [&] { return extract_trajectories(denoised, events, cfg.track); });
    files["trajectories.csv"] = trajectories_csv(trajs);
    files["trajectories.json"] = trajectories_summary(trajs).dump(2) + "\n";

    files["stats.json"] = stage(Stage::stats, [&] { return traffic_report(denoised, trajs, cfg.stats).dump(2) + "\n"; });

    stage(Stage::render, [&] {
        const auto img = render_image(denoised, trajs, cfg.render);
        files["waterfall.ppm"] = ppm_bytes(img);
        files["waterfall.ppm.legend.json"] = legend_json(trajs, cfg.render, img).dump(2) + "\n";
    });

    if (truth) {
        const auto found = as_detections(trajs);
        const auto score = score_method(found, *truth, cfg.baseline.tolerance_rows, cfg.baseline.tolerance_kmh);
        files["score.json"] = score_json(score).dump(2) + "\n";
    }
    files["config.json"] = config_to_json(cfg).dump(2) + "\n";

    nlohmann::json manifest;
    manifest["schema_version"] = 1;
    manifest["files"] = nlohmann::json::array();
    for (const auto& [name, bytes] : files) manifest["files"].push_back({{"name", name}, {"bytes", bytes.size()}});
    files["manifest.json"] = manifest.dump(2) + "\n";

    return Bundle{std::move(truth), std::move(denoised), std::move(events), std::move(trajs), std::move(files)};
}

void write_bundle(const Bundle& b, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    stage(Stage::write, [&] {
        fs::create_directories(out_dir);
        const fs::path staging = out_dir / (".staging-" + std::to_string(::getpid()));
        fs::remove_all(staging);
        fs::create_directories(staging);
        try {
            for (const auto& [name, bytes] : b.files) write_text(staging / name, bytes);
            for (const auto& [name, bytes] : b.files) fs::rename(staging / name, out_dir / name);
        } catch (...) {
            std::error_code ec;
            fs::remove_all(staging, ec);
            throw;
        }
        fs::remove_all(staging);
    });
}

} // namespace dasflow
