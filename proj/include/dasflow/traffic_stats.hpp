#pragma once

// Road-profile and road-segment traffic indices from fitted trajectories.
// Speeds in km/h. Profile: Q = N / T [veh/s], K = Q / TMS. Segment:
// K = N / L [veh/m], Q = K * SMS.

#include "dasflow/track.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dasflow {

struct ProfileQuery {
    double position = 0.0;     // m
    double window_start = 0.0; // s
    double window_end = 0.0;   // s
};

struct SegmentQuery {
    double seg_start = 0.0;  // m
    double seg_end = 0.0;    // m
    double time_start = 0.0; // s; equal to time_end for an instant
    double time_end = 0.0;
    double step = 1.0;       // s between averaged instants
};

struct Crossing {
    std::size_t vehicle_id;
    double time;       // s
    double speed_kmh;  // |fitted speed| at the crossing
};

struct TrafficRecord {
    enum class Kind { profile, segment } kind = Kind::profile;
    double vehicle_count = 0.0;          // integer for profiles; window mean for segments
    std::optional<double> mean_speed;    // TMS or SMS, km/h; absent when no vehicles
    double flow = 0.0;
    double density = 0.0;
    // Echo of the query for reporting.
    double position_a = 0.0, position_b = 0.0;
    double time_a = 0.0, time_b = 0.0;
};

void validate(const ProfileQuery& q);
void validate(const SegmentQuery& q);

// Crossings of the fitted paths through the profile, within each
// trajectory's own row span and the query window.
std::vector<Crossing> profile_crossings(std::span<const Trajectory> trajs, const ProfileQuery& q);

// Throws NumericError naming the vehicle if any crossing speed is zero.
TrafficRecord profile_stats(std::span<const Trajectory> trajs, const ProfileQuery& q);
TrafficRecord segment_stats(std::span<const Trajectory> trajs, const SegmentQuery& q);

// Drops digits beyond `decimals` (toward zero), tolerant to representation error.
double truncate_decimals(double value, int decimals);

// Table-style JSON: raw values plus truncated flow (2 dp) and density (4 dp).
nlohmann::json report_json(const TrafficRecord& r);
std::string format_row(const TrafficRecord& r);

} // namespace dasflow
