#pragma once

// Classical line-extraction baselines and a scorer against simulator truth.
// Lines use x = column, y = row: rho = x cos(theta) + y sin(theta).

#include "dasflow/forward_sim.hpp"
#include "dasflow/track.hpp"
#include "dasflow/waterfall.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace dasflow {

struct LineCandidate {
    double rho = 0.0;     // pixels
    double theta = 0.0;   // [0, pi)
    double score = 0.0;
    double velocity_kmh = 0.0;
    double entry_row = 0.0;  // row where the line meets column 0
};

struct HoughConfig {
    double binarize = 0.06;
    std::size_t vote_threshold = 400;
    std::size_t theta_bins = 720;
    std::size_t rho_bins = 0;       // 0: one bin per pixel of the diagonal range
    double min_kmh = 30.0;          // candidates outside [min_kmh, max_kmh] are dropped
    double max_kmh = 200.0;
};

struct HoughAccumulator {
    std::size_t theta_bins = 0;
    std::size_t rho_bins = 0;
    double rho_max = 0.0;  // rho range is [-rho_max, rho_max]
    std::vector<std::size_t> votes;  // theta-major

    double theta_of(std::size_t k) const;
    double rho_of(std::size_t r) const;
    std::size_t at(std::size_t k, std::size_t r) const { return votes[k * rho_bins + r]; }
};

HoughAccumulator hough_accumulate(const WaterfallMatrix& m, const HoughConfig& cfg);
std::vector<LineCandidate> hough_lines(const WaterfallMatrix& m, const HoughConfig& cfg);

// Velocity and column-0 row of a (rho, theta) line with the given origin.
void describe_line(LineCandidate& c, const Sampling& s, double origin_col = 0.0, double origin_row = 0.0);

// Projections by bilinear line sampling about the matrix centre, unit step
// along each ray. Rows are angles, columns offsets -half..half.
struct Sinogram {
    std::vector<double> angles;
    std::size_t offsets = 0;
    double half = 0.0;  // offset of column 0 is -half
    std::vector<double> values;

    double at(std::size_t a, std::size_t o) const { return values[a * offsets + o]; }
    double offset_of(std::size_t o) const { return static_cast<double>(o) - half; }
};

Sinogram radon_transform(const WaterfallMatrix& m, std::span<const double> angles);

// Angles (theta) whose stripes move at speeds in [min_kmh, max_kmh].
std::vector<double> stripe_angles(const Sampling& s, double min_kmh, double max_kmh, std::size_t count);

struct RadonConfig {
    double min_kmh = 30.0;
    double max_kmh = 200.0;
    std::size_t angle_count = 180;
    double relative_threshold = 0.3;  // of the sinogram maximum
    bool full_range = false;          // all of [0, pi) instead of the speed range
};

std::vector<LineCandidate> radon_lines(const WaterfallMatrix& m, const RadonConfig& cfg);

struct Detection {
    double entry_row = 0.0;
    double velocity_kmh = 0.0;
};

std::vector<Detection> as_detections(std::span<const LineCandidate> c);
std::vector<Detection> as_detections(std::span<const Trajectory> t);

struct MatchScore {
    std::size_t true_positive = 0;
    std::size_t false_positive = 0;
    std::size_t false_negative = 0;
    double velocity_rmse = 0.0;  // km/h over matches
};

// Greedy one-to-one matching by entry-row proximity.
MatchScore score_method(std::span<const Detection> found, const sim::GroundTruth& truth, double tol_rows,
                        double tol_kmh);

} // namespace dasflow
