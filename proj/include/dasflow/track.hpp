#pragma once

#include "dasflow/detect.hpp"
#include "dasflow/waterfall.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace dasflow {

// Least-squares polynomial x(t) = w0 + w1 t + ... + wM t^M via Householder QR.
// Throws NumericError when fewer than M + 1 distinct abscissae are given.
std::vector<double> polyfit(std::span<const double> t, std::span<const double> x, int order);
double polyval(std::span<const double> coeffs, double t);
double polyder(std::span<const double> coeffs, double t);
// Root-mean-square of x - polyval(t).
double residual_rms(std::span<const double> coeffs, std::span<const double> t, std::span<const double> x);

enum class VehicleClass { car, truck };
std::string_view class_name(VehicleClass c) noexcept;
VehicleClass class_from_name(std::string_view s);

struct TrackConfig {
    double v_min_init = 60.0;  // km/h
    double v_max_init = 120.0; // km/h
    double cof = 0.2;
    double key_interval = 1.0;     // s between key points; 0 = every row
    int order = 1;
    std::size_t fit_window = 0;    // most recent key points used per refit; 0 = all
    std::size_t max_coast = 3;     // 0 disables fade-out termination
    double amplitude_floor = 0.02;
    int direction = 1;             // +1 toward increasing column, -1 opposite
    double truck_peak = 0.5;
    double truck_width = 3.0;      // rows
};

void validate(const TrackConfig& cfg);

struct ColumnWindow {
    long lo;  // offset of the nearest admissible column, in travel direction
    long hi;
};

// Column offsets over `dt` seconds for speeds [v_lo, v_hi] km/h.
ColumnWindow column_window(double v_lo, double v_hi, double dt, double dx);

// Argmax of `row` inside [prev_col + lo, prev_col + hi] (mirrored for
// direction -1), clamped to the matrix, where the offsets cover `step_rows`
// rows of travel. Empty window -> nullopt. Ties go to the lowest column.
std::optional<std::size_t> match_step(const WaterfallMatrix& m, std::size_t prev_col, double v_lo,
                                      double v_hi, std::size_t row, int direction = 1,
                                      std::size_t step_rows = 1);

struct KeyPoint {
    std::size_t row;
    std::size_t col;
};

struct Trajectory {
    std::size_t vehicle_id = 0;
    std::vector<KeyPoint> points;
    std::vector<double> coeffs;     // column as a polynomial in row
    double velocity_kmh = 0.0;      // mean slope of the fit, signed
    double residual = 0.0;          // RMS, columns
    VehicleClass cls = VehicleClass::car;
    double mean_amplitude = 0.0;
    std::size_t entry_width = 0;
    Sampling sampling;

    bool single_point() const noexcept { return points.size() < 2; }
    std::size_t first_row() const { return points.front().row; }
    std::size_t last_row() const { return points.back().row; }
    // Fitted column and speed at a fractional row.
    double column_at(double row) const { return polyval(coeffs, row); }
    double speed_kmh_at(double row) const;
};

// Refits a trajectory from its key points and sampling (order capped by
// the number of distinct rows).
void refit(Trajectory& traj, int order);

VehicleClass classify_vehicle(double mean_amplitude, double entry_width, double peak_thresh,
                              double width_thresh) noexcept;
VehicleClass classify_vehicle(const Trajectory& traj, const WaterfallMatrix& m, double peak_thresh,
                              double width_thresh);

Trajectory track_vehicle(const WaterfallMatrix& m, const EntryEvent& event, const TrackConfig& cfg);
std::vector<Trajectory> extract_trajectories(const WaterfallMatrix& m, std::span<const EntryEvent> events,
                                             const TrackConfig& cfg);

} // namespace dasflow
