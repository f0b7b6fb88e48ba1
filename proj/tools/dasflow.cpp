#include "dasflow/baselines.hpp"
#include "dasflow/config.hpp"
#include "dasflow/detect.hpp"
#include "dasflow/forward_sim.hpp"
#include "dasflow/pipeline.hpp"
#include "dasflow/preprocess.hpp"
#include "dasflow/records_io.hpp"
#include "dasflow/render.hpp"
#include "dasflow/scenarios.hpp"
#include "dasflow/track.hpp"
#include "dasflow/traffic_stats.hpp"
#include "dasflow/waterfall.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace dasflow;

namespace {

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
};

PipelineConfig load_cfg(const Globals& g) {
    if (g.config.empty()) return {};
    try {
        return load_config(g.config);
    } catch (const std::exception& e) {
        throw StageError(Stage::config, e.what());
    }
}

template <class F>
auto at(Stage s, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(s, e.what());
    }
}

fs::path out_path(const Globals& g, const std::string& given, const char* fallback) {
    return given.empty() ? fs::path(g.out_dir) / fallback : fs::path(given);
}

void make_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void put(const fs::path& p, const std::string& text) {
    at(Stage::write, [&] {
        make_parent(p);
        write_text(p, text);
    });
}

WaterfallMatrix load_matrix(const std::string& path) {
    return at(Stage::load, [&] { return load_waterfall(path, format_for_path(path)); });
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dasflow: DAS waterfall vehicle detection, tracking and traffic statistics"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "pipeline config JSON");
    app.add_option("--seed", g.seed, "noise seed override for synthesized scenes");
    app.add_option("--out-dir", g.out_dir, "output directory for default file names");
    app.fallthrough();

    // sim
    auto* sim_cmd = app.add_subcommand("sim", "synthesize a waterfall and its ground truth");
    std::string sim_scene, sim_kind, sim_out, sim_truth;
    std::uint64_t sim_kind_seed = 1;
    double sim_snr = 10.0;
    auto* sim_scene_opt = sim_cmd->add_option("--scene", sim_scene, "scene JSON");
    sim_cmd->add_option("--kind", sim_kind, "generated scene: simple, crossing or congestion")
        ->check(CLI::IsMember({"simple", "crossing", "congestion"}))
        ->excludes(sim_scene_opt);
    sim_cmd->add_option("--scene-seed", sim_kind_seed, "generator seed for --kind");
    sim_cmd->add_option("--snr", sim_snr, "power SNR for --kind");
    sim_cmd->add_option("--out", sim_out, "waterfall output (.dasw or .csv)");
    sim_cmd->add_option("--truth", sim_truth, "ground truth CSV output");

    // preprocess
    auto* pre_cmd = app.add_subcommand("preprocess", "normalize and wavelet-denoise a waterfall");
    std::string pre_in, pre_out;
    std::optional<double> pre_lambda, pre_mix;
    std::optional<std::string> pre_wavelet;
    std::optional<int> pre_levels;
    pre_cmd->add_option("--in", pre_in)->required();
    pre_cmd->add_option("--out", pre_out);
    pre_cmd->add_option("--lambda", pre_lambda);
    pre_cmd->add_option("--mix", pre_mix);
    pre_cmd->add_option("--wavelet", pre_wavelet);
    pre_cmd->add_option("--levels", pre_levels);

    // metrics
    auto* met_cmd = app.add_subcommand("metrics", "MSE, PSNR and SSIM between two waterfalls");
    std::string met_ref, met_test, met_out;
    met_cmd->add_option("--ref", met_ref)->required();
    met_cmd->add_option("--test", met_test)->required();
    met_cmd->add_option("--out", met_out, "JSON output (stdout if omitted)");

    // detect
    auto* det_cmd = app.add_subcommand("detect", "vehicle entry events at the entry channel");
    std::string det_in, det_out;
    std::optional<int> det_order;
    std::optional<double> det_cutoff, det_height;
    std::optional<std::size_t> det_col;
    std::optional<double> det_sep;
    det_cmd->add_option("--in", det_in)->required();
    det_cmd->add_option("--out", det_out);
    det_cmd->add_option("--order", det_order);
    det_cmd->add_option("--cutoff", det_cutoff);
    det_cmd->add_option("--min-height", det_height);
    det_cmd->add_option("--entry-col", det_col);
    det_cmd->add_option("--min-separation", det_sep, "seconds; 0 keeps every crest");

    // track
    auto* trk_cmd = app.add_subcommand("track", "grow trajectories from entry events");
    std::string trk_in, trk_events, trk_out, trk_summary;
    std::optional<double> trk_vmin, trk_vmax, trk_cof;
    std::optional<int> trk_order;
    trk_cmd->add_option("--in", trk_in)->required();
    trk_cmd->add_option("--events", trk_events)->required();
    trk_cmd->add_option("--out", trk_out);
    trk_cmd->add_option("--summary", trk_summary);
    trk_cmd->add_option("--vmin", trk_vmin);
    trk_cmd->add_option("--vmax", trk_vmax);
    trk_cmd->add_option("--cof", trk_cof);
    trk_cmd->add_option("--order", trk_order);

    // stats
    auto* st_cmd = app.add_subcommand("stats", "profile or segment traffic indices");
    std::string st_trajs, st_out;
    std::optional<double> st_profile, st_at;
    std::vector<double> st_window, st_segment;
    int st_order = 1;
    st_cmd->add_option("--trajectories", st_trajs)->required();
    auto* st_profile_opt = st_cmd->add_option("--profile", st_profile, "profile position [m]");
    auto* st_window_opt = st_cmd->add_option("--window", st_window, "s,e [s]")->delimiter(',')->expected(2);
    auto* st_segment_opt = st_cmd->add_option("--segment", st_segment, "a,b [m]")->delimiter(',')->expected(2);
    auto* st_at_opt = st_cmd->add_option("--at", st_at, "instant [s]");
    st_cmd->add_option("--order", st_order, "fit order used to refit the trajectories");
    st_cmd->add_option("--out", st_out, "JSON output (stdout if omitted)");
    st_profile_opt->needs(st_window_opt)->excludes(st_segment_opt);
    st_segment_opt->needs(st_at_opt);

    // render
    auto* ren_cmd = app.add_subcommand("render", "waterfall image with trajectory overlay");
    std::string ren_in, ren_trajs, ren_out;
    std::optional<std::string> ren_cmap;
    std::optional<std::size_t> ren_w, ren_h;
    bool ren_no_overlay = false;
    ren_cmd->add_option("--in", ren_in)->required();
    ren_cmd->add_option("--trajectories", ren_trajs);
    ren_cmd->add_option("--out", ren_out);
    ren_cmd->add_option("--colormap", ren_cmap)->check(CLI::IsMember({"grayscale", "heat"}));
    ren_cmd->add_option("--width", ren_w);
    ren_cmd->add_option("--height", ren_h);
    ren_cmd->add_flag("--no-overlay", ren_no_overlay);

    // baseline
    auto* bl_cmd = app.add_subcommand("baseline", "Hough or Radon line detection and scoring");
    std::string bl_in, bl_method, bl_truth, bl_out, bl_score;
    bl_cmd->add_option("--in", bl_in)->required();
    bl_cmd->add_option("--method", bl_method)->required()->check(CLI::IsMember({"hough", "radon"}));
    bl_cmd->add_option("--truth", bl_truth);
    bl_cmd->add_option("--out", bl_out);
    bl_cmd->add_option("--score", bl_score);

    // pipeline
    auto* pl_cmd = app.add_subcommand("pipeline", "run every stage and write the artifact bundle");
    std::string pl_in;
    pl_cmd->add_option("--in", pl_in, "scene JSON or waterfall")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_code(Stage::config);
    }

    try {
        PipelineConfig cfg = load_cfg(g);
        auto& cfg_ref = cfg;

        if (*sim_cmd) {
            sim::Scene scene = at(Stage::load, [&] {
                if (!sim_scene.empty()) return sim::load_scene(sim_scene);
                if (sim_kind.empty()) throw std::invalid_argument("sim: --scene or --kind is required");
                if (sim_kind == "simple") return sim::simple_scene(sim_kind_seed, sim_snr);
                if (sim_kind == "crossing") return sim::crossing_scene(sim_kind_seed, sim_snr);
                return sim::congestion_scene(sim_kind_seed, sim_snr);
            });
            if (g.seed) scene.rng_seed = *g.seed;
            auto syn = at(Stage::sim, [&] { return sim::synthesize_waterfall(scene); });
            const auto wpath = out_path(g, sim_out, "input.dasw");
            at(Stage::write, [&] {
                make_parent(wpath);
                save_waterfall(syn.matrix, wpath, format_for_path(wpath));
            });
            put(out_path(g, sim_truth, "truth.csv"), sim::ground_truth_csv(syn.truth));
            return 0;
        }

        if (*pre_cmd) {
            if (pre_lambda) cfg.denoise.threshold = *pre_lambda;
            if (pre_mix) cfg.denoise.mix = *pre_mix;
            if (pre_wavelet) cfg.denoise.wavelet = *pre_wavelet;
            if (pre_levels) cfg.denoise.levels = *pre_levels;
            at(Stage::config, [&] { validate(cfg_ref); });
            const auto m = load_matrix(pre_in);
            const auto d = at(Stage::preprocess, [&] { return wavelet_denoise(minmax_normalize(m), cfg_ref.denoise); });
            const auto p = out_path(g, pre_out, "denoised.dasw");
            at(Stage::write, [&] {
                make_parent(p);
                save_waterfall(d, p, format_for_path(p));
            });
            return 0;
        }

        if (*met_cmd) {
            const auto ref = load_matrix(met_ref);
            const auto test = load_matrix(met_test);
            const auto q = at(Stage::preprocess, [&] { return quality_metrics(ref, test); });
            const auto text = dump(quality_json(q));
            if (met_out.empty()) std::cout << text;
            else put(met_out, text);
            return 0;
        }

        if (*det_cmd) {
            if (det_order) cfg.detect.butterworth.order = *det_order;
            if (det_cutoff) cfg.detect.butterworth.cutoff = *det_cutoff;
            if (det_height) cfg.detect.min_height = *det_height;
            if (det_col) cfg.detect.entry_col = *det_col;
            if (det_sep) cfg.detect.min_separation = *det_sep;
            at(Stage::config, [&] { validate(cfg_ref); });
            const auto m = load_matrix(det_in);
            const auto events = at(Stage::detect, [&] { return detect_entries(m, cfg_ref.detect); });
            put(out_path(g, det_out, "events.csv"), events_csv(events, m.sampling()));
            return 0;
        }

        if (*trk_cmd) {
            if (trk_vmin) cfg.track.v_min_init = *trk_vmin;
            if (trk_vmax) cfg.track.v_max_init = *trk_vmax;
            if (trk_cof) cfg.track.cof = *trk_cof;
            if (trk_order) cfg.track.order = *trk_order;
            at(Stage::config, [&] { validate(cfg_ref); });
            const auto m = load_matrix(trk_in);
            const auto events = at(Stage::load, [&] { return parse_events_csv(read_text(trk_events)); });
            const auto trajs = at(Stage::track, [&] { return extract_trajectories(m, events, cfg_ref.track); });
            put(out_path(g, trk_out, "trajectories.csv"), trajectories_csv(trajs));
            put(out_path(g, trk_summary, "trajectories.json"), dump(trajectories_summary(trajs)));
            return 0;
        }

        if (*st_cmd) {
            const auto trajs =
                at(Stage::load, [&] { return parse_trajectories_csv(read_text(st_trajs), st_order); });
            const auto rec = at(Stage::stats, [&] {
                if (st_profile) return profile_stats(trajs, ProfileQuery{*st_profile, st_window[0], st_window[1]});
                if (st_segment.size() == 2)
                    return segment_stats(trajs, SegmentQuery{st_segment[0], st_segment[1], *st_at, *st_at, 1.0});
                throw std::invalid_argument("stats: give --profile with --window, or --segment with --at");
            });
            const auto text = dump(report_json(rec));
            if (st_out.empty()) std::cout << text;
            else put(st_out, text);
            return 0;
        }

        if (*ren_cmd) {
            if (ren_cmap) cfg.render.colormap = *ren_cmap == "heat" ? Colormap::heat : Colormap::grayscale;
            if (ren_w) cfg.render.width = *ren_w;
            if (ren_h) cfg.render.height = *ren_h;
            if (ren_no_overlay) cfg.render.overlay = false;
            at(Stage::config, [&] { validate(cfg_ref); });
            const auto m = load_matrix(ren_in);
            std::vector<Trajectory> trajs;
            if (!ren_trajs.empty())
                trajs = at(Stage::load, [&] { return parse_trajectories_csv(read_text(ren_trajs), cfg_ref.track.order); });
            const auto img = at(Stage::render, [&] { return render_image(m, trajs, cfg_ref.render); });
            const auto p = out_path(g, ren_out, "waterfall.ppm");
            put(p, ppm_bytes(img));
            put(p.string() + ".legend.json", dump(legend_json(trajs, cfg_ref.render, img)));
            return 0;
        }

        if (*bl_cmd) {
            const auto m = load_matrix(bl_in);
            std::optional<sim::GroundTruth> truth;
            if (!bl_truth.empty()) truth = at(Stage::load, [&] { return sim::load_ground_truth(bl_truth); });
            const auto cands = at(Stage::detect, [&] {
                return bl_method == "hough" ? hough_lines(m, cfg_ref.baseline.hough) : radon_lines(m, cfg_ref.baseline.radon);
            });
            put(out_path(g, bl_out, (bl_method + "_candidates.csv").c_str()), candidates_csv(cands));
            if (truth) {
                const auto found = as_detections(cands);
                const auto s = score_method(found, *truth, cfg.baseline.tolerance_rows, cfg.baseline.tolerance_kmh);
                put(out_path(g, bl_score, (bl_method + "_score.json").c_str()), dump(score_json(s)));
            }
            return 0;
        }

        if (*pl_cmd) {
            std::optional<std::uint64_t> seed = g.seed;
            if (!seed && !g.config.empty()) seed = cfg.rng_seed;
            const auto bundle = run_pipeline(pl_in, cfg, seed);
            write_bundle(bundle, g.out_dir);
            return 0;
        }
    } catch (const StageError& e) {
        std::cerr << "dasflow: " << e.what() << "\n";
        return exit_code(e.stage());
    } catch (const std::exception& e) {
        std::cerr << "dasflow: " << e.what() << "\n";
        return exit_code(Stage::write);
    }
    return 0;
}
