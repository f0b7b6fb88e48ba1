#pragma once

// preprocess -> detect -> track -> stats -> render, fully in memory; the
// bundle is written only after every stage has succeeded.

#include "dasflow/config.hpp"
#include "dasflow/detect.hpp"
#include "dasflow/errors.hpp"
#include "dasflow/forward_sim.hpp"
#include "dasflow/track.hpp"
#include "dasflow/waterfall.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dasflow {

enum class Stage { config = 1, load = 2, preprocess = 3, detect = 4, track = 5, stats = 6, render = 7, sim = 8, write = 9 };

std::string_view stage_name(Stage s) noexcept;
inline int exit_code(Stage s) noexcept { return static_cast<int>(s); }

class StageError : public Error {
public:
    StageError(Stage stage, const std::string& what)
        : Error(std::string(stage_name(stage)) + ": " + what), stage_(stage) {}
    Stage stage() const noexcept { return stage_; }

private:
    Stage stage_;
};

struct Bundle {
    std::optional<sim::GroundTruth> truth;
    WaterfallMatrix denoised;
    std::vector<EntryEvent> events;
    std::vector<Trajectory> trajectories;
    // File name -> exact bytes.
    std::map<std::string, std::string> files;
};

// `input` is a scene (.json) or a waterfall (.csv or DASW). When `seed` is
// given it replaces the scene's noise seed.
Bundle run_pipeline(const std::filesystem::path& input, const PipelineConfig& cfg,
                    std::optional<std::uint64_t> seed = std::nullopt);

// Writes into a staging directory, then moves every file into `out_dir`.
void write_bundle(const Bundle& b, const std::filesystem::path& out_dir);

} // namespace dasflow
