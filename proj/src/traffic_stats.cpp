#include "dasflow/traffic_stats.hpp"

#include "dasflow/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace dasflow {

void validate(const ProfileQuery& q) {
    if (!(q.window_end > q.window_start)) throw std::invalid_argument("profile: window end must exceed start");
    if (!std::isfinite(q.position)) throw std::invalid_argument("profile: position must be finite");
}

void validate(const SegmentQuery& q) {
    if (!(q.seg_end > q.seg_start)) throw std::invalid_argument("segment: end must exceed start");
    if (!(q.time_end >= q.time_start)) throw std::invalid_argument("segment: time window reversed");
    if (!(q.step > 0.0)) throw std::invalid_argument("segment: step must be > 0");
}

namespace {

// First root of f on [lo, hi], scanning unit steps then bisecting.
template <class F>
std::optional<double> first_root(F f, double lo, double hi) {
    double a = lo;
    double fa = f(a);
    if (fa == 0.0) return a;
    while (a < hi) {
        const double b = std::min(a + 1.0, hi);
        const double fb = f(b);
        if (fb == 0.0) return b;
        if ((fa < 0.0) != (fb < 0.0)) {
            double l = a, r = b, fl = fa;
            for (int it = 0; it < 200 && r - l > 1e-12; ++it) {
                const double mid = 0.5 * (l + r);
                const double fm = f(mid);
                if (fm == 0.0) return mid;
                if ((fm < 0.0) == (fl < 0.0)) {
                    l = mid;
                    fl = fm;
                } else {
                    r = mid;
                }
            }
            return 0.5 * (l + r);
        }
        a = b;
        fa = fb;
    }
    return std::nullopt;
}

} // namespace

std::vector<Crossing> profile_crossings(std::span<const Trajectory> trajs, const ProfileQuery& q) {
    validate(q);
    std::vector<Crossing> out;
    for (const auto& tr : trajs) {
        if (tr.single_point() || tr.coeffs.empty()) continue;
        const auto& s = tr.sampling;
        const double target = (q.position - s.x0) / s.dx;
        const double r0 = static_cast<double>(tr.first_row());
        const double r1 = static_cast<double>(tr.last_row());
        std::optional<double> row;
        if (tr.coeffs.size() == 2) {
            if (tr.coeffs[1] != 0.0) {
                const double r = (target - tr.coeffs[0]) / tr.coeffs[1];
                if (r >= r0 && r <= r1) row = r;
            } else if (tr.coeffs[0] == target) {
                row = r0;
            }
        } else {
            row = first_root([&](double r) { return tr.column_at(r) - target; }, r0, r1);
        }
        if (!row) continue;
        const double time = s.t0 + *row * s.dt;
        if (time < q.window_start || time >= q.window_end) continue;
        out.push_back({tr.vehicle_id, time, std::fabs(tr.speed_kmh_at(*row))});
    }
    return out;
}

TrafficRecord profile_stats(std::span<const Trajectory> trajs, const ProfileQuery& q) {
    const auto crossings = profile_crossings(trajs, q);
    TrafficRecord r;
    r.kind = TrafficRecord::Kind::profile;
    r.position_a = r.position_b = q.position;
    r.time_a = q.window_start;
    r.time_b = q.window_end;
    r.vehicle_count = static_cast<double>(crossings.size());
    r.flow = r.vehicle_count / (q.window_end - q.window_start);
    if (crossings.empty()) return r;
    double inv = 0.0;
    for (const auto& c : crossings) {
        if (c.speed_kmh == 0.0)
            throw NumericError("profile: vehicle " + std::to_string(c.vehicle_id) +
                               " has zero speed at the profile; harmonic mean undefined");
        inv += 1.0 / c.speed_kmh;
    }
    const double tms = r.vehicle_count / inv;
    r.mean_speed = tms;
    r.density = r.flow / tms;
    return r;
}

TrafficRecord segment_stats(std::span<const Trajectory> trajs, const SegmentQuery& q) {
    validate(q);
    TrafficRecord r;
    r.kind = TrafficRecord::Kind::segment;
    r.position_a = q.seg_start;
    r.position_b = q.seg_end;
    r.time_a = q.time_start;
    r.time_b = q.time_end;

    std::size_t instants = 0;
    std::size_t present = 0;
    double speed_sum = 0.0;
    for (std::size_t k = 0;; ++k) {
        const double t = q.time_start + static_cast<double>(k) * q.step;
        if (t > q.time_end + 1e-9 * q.step) break;
        ++instants;
        for (const auto& tr : trajs) {
            if (tr.coeffs.empty()) continue;
            const auto& s = tr.sampling;
            const double row = (t - s.t0) / s.dt;
            if (row < static_cast<double>(tr.first_row()) || row > static_cast<double>(tr.last_row())) continue;
            const double pos = s.x0 + tr.column_at(row) * s.dx;
            if (pos < q.seg_start || pos > q.seg_end) continue;
            ++present;
            speed_sum += std::fabs(tr.speed_kmh_at(row));
        }
    }
    r.vehicle_count = static_cast<double>(present) / static_cast<double>(instants);
    r.density = r.vehicle_count / (q.seg_end - q.seg_start);
    if (present == 0) return r;
    const double sms = speed_sum / static_cast<double>(present);
    r.mean_speed = sms;
    r.flow = r.density * sms;
    return r;
}

double truncate_decimals(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    const double scaled = value * scale;
    const double nearest = std::round(scaled);
    // Snap 9.9999999999-style products to the integer before truncating.
    const double snapped = std::fabs(scaled - nearest) < 1e-9 * std::max(1.0, std::fabs(scaled)) ? nearest : scaled;
    return std::trunc(snapped) / scale;
}

nlohmann::json report_json(const TrafficRecord& r) {
    nlohmann::json j;
    j["schema_version"] = 1;
    const bool profile = r.kind == TrafficRecord::Kind::profile;
    j["kind"] = profile ? "profile" : "segment";
    if (profile) {
        j["time_s"] = {r.time_a, r.time_b};
        j["position_m"] = r.position_a;
    } else {
        j["time_s"] = r.time_a == r.time_b ? nlohmann::json(r.time_a) : nlohmann::json{r.time_a, r.time_b};
        j["position_m"] = {r.position_a, r.position_b};
    }
    j["vehicle_count"] = r.vehicle_count;
    j["average_velocity_kmh"] = r.mean_speed ? nlohmann::json(*r.mean_speed) : nlohmann::json(nullptr);
    j["flow"] = truncate_decimals(r.flow, 2);
    j["density"] = truncate_decimals(r.density, 4);
    j["flow_raw"] = r.flow;
    j["density_raw"] = r.density;
    j["flow_unit"] = profile ? "veh/s" : "veh/m * km/h";
    j["density_unit"] = profile ? "(veh/s) / (km/h)" : "veh/m";
    return j;
}

std::string format_row(const TrafficRecord& r) {
    char buf[160];
    const std::string speed = r.mean_speed ? ([&] {
        char s[32];
        std::snprintf(s, sizeof s, "%.2fkm/h", *r.mean_speed);
        return std::string(s);
    })()
                                           : std::string("-");
    std::snprintf(buf, sizeof buf, "%g %s %.2f %.4f", r.vehicle_count, speed.c_str(),
                  truncate_decimals(r.flow, 2), truncate_decimals(r.density, 4));
    return buf;
}

} // namespace dasflow
