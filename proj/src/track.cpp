#include "dasflow/track.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dasflow {

namespace {
constexpr double kKmhPerMps = 3.6;
}

std::string_view class_name(VehicleClass c) noexcept {
    return c == VehicleClass::truck ? "truck" : "car";
}

VehicleClass class_from_name(std::string_view s) {
    if (s == "car") return VehicleClass::car;
    if (s == "truck") return VehicleClass::truck;
    throw std::invalid_argument("unknown vehicle class '" + std::string(s) + "'");
}

void validate(const TrackConfig& cfg) {
    if (!(cfg.key_interval >= 0.0)) throw std::invalid_argument("track: key_interval must be >= 0");
    if (!(cfg.v_min_init > 0.0 && cfg.v_min_init < cfg.v_max_init))
        throw std::invalid_argument("track: need 0 < vmin < vmax");
    if (!(cfg.cof >= 0.0 && cfg.cof < 1.0)) throw std::invalid_argument("track: cof must lie in [0, 1)");
    if (cfg.order < 0) throw std::invalid_argument("track: order must be >= 0");
    if (!(cfg.amplitude_floor >= 0.0)) throw std::invalid_argument("track: amplitude floor must be >= 0");
    if (cfg.direction != 1 && cfg.direction != -1) throw std::invalid_argument("track: direction must be +1 or -1");
}

ColumnWindow column_window(double v_lo, double v_hi, double dt, double dx) {
    const double lo = v_lo / kKmhPerMps * dt / dx;
    const double hi = v_hi / kKmhPerMps * dt / dx;
    return {static_cast<long>(std::floor(lo)), static_cast<long>(std::ceil(hi))};
}

std::optional<std::size_t> match_step(const WaterfallMatrix& m, std::size_t prev_col, double v_lo,
                                      double v_hi, std::size_t row, int direction, std::size_t step_rows) {
    if (row >= m.rows()) throw std::invalid_argument("match_step: row out of range");
    if (step_rows == 0) throw std::invalid_argument("match_step: step_rows must be >= 1");
    const auto w = column_window(v_lo, v_hi, m.dt() * static_cast<double>(step_rows), m.dx());
    const long prev = static_cast<long>(prev_col);
    long first = direction >= 0 ? prev + w.lo : prev - w.hi;
    long last = direction >= 0 ? prev + w.hi : prev - w.lo;
    first = std::max(first, 0L);
    last = std::min(last, static_cast<long>(m.cols()) - 1);
    if (first > last) return std::nullopt;

    const auto values = m.row(row);
    std::size_t best = static_cast<std::size_t>(first);
    for (long c = first + 1; c <= last; ++c)
        if (values[static_cast<std::size_t>(c)] > values[best]) best = static_cast<std::size_t>(c);
    return best;
}

double Trajectory::speed_kmh_at(double row) const {
    return polyder(coeffs, row) * sampling.dx / sampling.dt * kKmhPerMps;
}

void refit(Trajectory& traj, int order) {
    if (traj.points.empty()) throw std::invalid_argument("refit: empty trajectory");
    std::vector<double> t, x;
    for (const auto& p : traj.points) {
        t.push_back(static_cast<double>(p.row));
        x.push_back(static_cast<double>(p.col));
    }
    const int usable = std::min<int>(order, static_cast<int>(traj.points.size()) - 1);
    traj.coeffs = polyfit(t, x, usable);
    traj.residual = residual_rms(traj.coeffs, t, x);
    if (traj.single_point()) {
        traj.velocity_kmh = 0.0;
        return;
    }
    const double r0 = t.front(), r1 = t.back();
    const double cols_per_row = (polyval(traj.coeffs, r1) - polyval(traj.coeffs, r0)) / (r1 - r0);
    traj.velocity_kmh = cols_per_row * traj.sampling.dx / traj.sampling.dt * kKmhPerMps;
}

VehicleClass classify_vehicle(double mean_amplitude, double entry_width, double peak_thresh,
                              double width_thresh) noexcept {
    return (mean_amplitude > peak_thresh && entry_width > width_thresh) ? VehicleClass::truck
                                                                        : VehicleClass::car;
}

VehicleClass classify_vehicle(const Trajectory& traj, const WaterfallMatrix& m, double peak_thresh,
                              double width_thresh) {
    if (traj.points.empty()) throw std::invalid_argument("classify_vehicle: empty trajectory");
    double sum = 0.0;
    for (const auto& p : traj.points) sum += m.at(p.row, p.col);
    const double mean = sum / static_cast<double>(traj.points.size());
    return classify_vehicle(mean, static_cast<double>(traj.entry_width), peak_thresh, width_thresh);
}

Trajectory track_vehicle(const WaterfallMatrix& m, const EntryEvent& event, const TrackConfig& cfg) {
    validate(cfg);
    if (event.entry_row >= m.rows() || event.entry_col >= m.cols())
        throw std::invalid_argument("track: entry event outside the matrix");

    Trajectory traj;
    traj.vehicle_id = event.vehicle_id;
    traj.sampling = m.sampling();
    traj.entry_width = event.peak.width;
    traj.points.push_back({event.entry_row, event.entry_col});

    const std::size_t edge = cfg.direction > 0 ? m.cols() - 1 : 0;
    std::size_t coast = 0;
    std::vector<double> t, x;
    const std::size_t step = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.key_interval / m.dt())));
    for (std::size_t row = event.entry_row + step; row < m.rows(); row += step) {
        double v_lo = cfg.v_min_init, v_hi = cfg.v_max_init;
        if (traj.points.size() >= 2) {
            const std::size_t count = traj.points.size();
            const std::size_t take = cfg.fit_window == 0 ? count : std::min(count, std::max<std::size_t>(cfg.fit_window, 2));
            t.clear();
            x.clear();
            for (std::size_t i = count - take; i < count; ++i) {
                t.push_back(static_cast<double>(traj.points[i].row));
                x.push_back(static_cast<double>(traj.points[i].col));
            }
            const int order = std::min<int>(cfg.order, static_cast<int>(take) - 1);
            const auto w = polyfit(t, x, order);
            const double v = cfg.direction * polyder(w, t.back()) * m.dx() / m.dt() * kKmhPerMps;
            if (v > 0.0) {
                v_lo = (1.0 - cfg.cof) * v;
                v_hi = (1.0 + cfg.cof) * v;
            }
        }
        const std::size_t prev = traj.points.back().col;
        auto col = match_step(m, prev, v_lo, v_hi, row, cfg.direction, step);
        if (!col && step > 1) {
            // full step runs off the fiber; shorten it to reach the edge
            const double per_row = 0.5 * (v_lo + v_hi) / kKmhPerMps * m.dt() / m.dx();
            const double left = static_cast<double>(cfg.direction > 0 ? edge - prev : prev - edge);
            const auto s = static_cast<std::size_t>(std::ceil(left / per_row));
            const std::size_t last_row = traj.points.back().row;
            if (s >= 1 && s < step && last_row + s < m.rows()) {
                row = last_row + s;
                col = match_step(m, prev, v_lo, v_hi, row, cfg.direction, s);
            }
        }
        if (!col) break;
        traj.points.push_back({row, *col});
        coast = m.at(row, *col) < cfg.amplitude_floor ? coast + 1 : 0;
        if (cfg.max_coast > 0 && coast >= cfg.max_coast) {
            traj.points.resize(traj.points.size() - coast);
            break;
        }
        if (*col == edge) break;
    }

    refit(traj, cfg.order);
    double sum = 0.0;
    for (const auto& p : traj.points) sum += m.at(p.row, p.col);
    traj.mean_amplitude = sum / static_cast<double>(traj.points.size());
    traj.cls = classify_vehicle(traj.mean_amplitude, static_cast<double>(traj.entry_width), cfg.truck_peak,
                                cfg.truck_width);
    return traj;
}

std::vector<Trajectory> extract_trajectories(const WaterfallMatrix& m, std::span<const EntryEvent> events,
                                             const TrackConfig& cfg) {
    validate(cfg);
    std::vector<Trajectory> out;
    out.reserve(events.size());
    for (const auto& e : events) out.push_back(track_vehicle(m, e, cfg));
    std::stable_sort(out.begin(), out.end(),
                     [](const Trajectory& a, const Trajectory& b) { return a.first_row() < b.first_row(); });
    return out;
}

} // namespace dasflow
