#pragma once

// Text serialization of pipeline records: events, trajectories, baseline
// candidates, scores and quality reports.

#include "dasflow/baselines.hpp"
#include "dasflow/detect.hpp"
#include "dasflow/preprocess.hpp"
#include "dasflow/track.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace dasflow {

// Shortest round-trip decimal.
std::string format_double(double v);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// vehicle_id,entry_row,entry_time_s,peak_height,peak_width
std::string events_csv(std::span<const EntryEvent> events, const Sampling& s);
std::vector<EntryEvent> parse_events_csv(const std::string& text);

// vehicle_id,row,time_s,col,position_m,class,fitted_velocity_kmh,residual_rms
std::string trajectories_csv(std::span<const Trajectory> trajs);
// Rebuilds key points and sampling from the CSV and refits at `order`.
std::vector<Trajectory> parse_trajectories_csv(const std::string& text, int order = 1);
nlohmann::json trajectories_summary(std::span<const Trajectory> trajs);

// rho,theta,score,velocity_kmh,entry_row
std::string candidates_csv(std::span<const LineCandidate> c);

nlohmann::json score_json(const MatchScore& s);
nlohmann::json quality_json(const QualityReport& q);

} // namespace dasflow
