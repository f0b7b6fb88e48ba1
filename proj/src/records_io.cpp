#include "dasflow/records_io.hpp"

#include "dasflow/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace dasflow {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

namespace {

std::vector<std::vector<std::string>> split_csv(const std::string& text, const std::string& header,
                                                const char* what) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError(std::string(what) + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw FormatError(std::string(what) + ": expected header '" + header + "'");
    const auto width = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',') + 1);
    std::vector<std::vector<std::string>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        if (fields.size() != width)
            throw FormatError(std::string(what) + ": wrong field count on line " + std::to_string(line_no));
        rows.push_back(std::move(fields));
    }
    return rows;
}

double to_double(const std::string& s, const char* what) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw FormatError(std::string(what) + ": bad number '" + s + "'");
    return v;
}

std::size_t to_index(const std::string& s, const char* what) {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw FormatError(std::string(what) + ": bad integer '" + s + "'");
    return v;
}

const std::string kEventsHeader = "vehicle_id,entry_row,entry_time_s,peak_height,peak_width";
const std::string kTrajHeader = "vehicle_id,row,time_s,col,position_m,class,fitted_velocity_kmh,residual_rms";

} // namespace

std::string events_csv(std::span<const EntryEvent> events, const Sampling& s) {
    std::string out = kEventsHeader + "\n";
    for (const auto& e : events) {
        out += std::to_string(e.vehicle_id) + "," + std::to_string(e.entry_row) + "," +
               format_double(s.t0 + static_cast<double>(e.entry_row) * s.dt) + "," + format_double(e.peak.height) +
               "," + std::to_string(e.peak.width) + "\n";
    }
    return out;
}

std::vector<EntryEvent> parse_events_csv(const std::string& text) {
    std::vector<EntryEvent> events;
    for (const auto& f : split_csv(text, kEventsHeader, "events")) {
        EntryEvent e;
        e.vehicle_id = to_index(f[0], "events");
        e.entry_row = to_index(f[1], "events");
        e.entry_col = 0;
        e.peak = {e.entry_row, to_double(f[3], "events"), to_index(f[4], "events")};
        events.push_back(e);
    }
    return events;
}

std::string trajectories_csv(std::span<const Trajectory> trajs) {
    std::string out = kTrajHeader + "\n";
    for (const auto& t : trajs) {
        const std::string tail = "," + std::string(class_name(t.cls)) + "," + format_double(t.velocity_kmh) + "," +
                                 format_double(t.residual) + "\n";
        for (const auto& p : t.points) {
            out += std::to_string(t.vehicle_id) + "," + std::to_string(p.row) + "," +
                   format_double(t.sampling.t0 + static_cast<double>(p.row) * t.sampling.dt) + "," +
                   std::to_string(p.col) + "," +
                   format_double(t.sampling.x0 + static_cast<double>(p.col) * t.sampling.dx) + tail;
        }
    }
    return out;
}

std::vector<Trajectory> parse_trajectories_csv(const std::string& text, int order) {
    struct Line {
        std::size_t row, col;
        double time, pos;
        VehicleClass cls;
    };
    std::map<std::size_t, std::vector<Line>> by_id;
    std::vector<std::size_t> order_seen;
    for (const auto& f : split_csv(text, kTrajHeader, "trajectories")) {
        const std::size_t id = to_index(f[0], "trajectories");
        VehicleClass cls;
        try {
            cls = class_from_name(f[5]);
        } catch (const std::invalid_argument& e) {
            throw FormatError(std::string("trajectories: ") + e.what());
        }
        if (!by_id.count(id)) order_seen.push_back(id);
        by_id[id].push_back({to_index(f[1], "trajectories"), to_index(f[3], "trajectories"),
                             to_double(f[2], "trajectories"), to_double(f[4], "trajectories"), cls});
    }

    // Recover the sampling grid from any two points that differ in row / column.
    std::optional<Line> first;
    Sampling s;
    bool have_dt = false, have_dx = false;
    for (const auto& [id, lines] : by_id) {
        for (const auto& l : lines) {
            if (!first) {
                first = l;
                continue;
            }
            if (!have_dt && l.row != first->row) {
                s.dt = (l.time - first->time) / (static_cast<double>(l.row) - static_cast<double>(first->row));
                have_dt = s.dt > 0.0;
            }
            if (!have_dx && l.col != first->col) {
                s.dx = (l.pos - first->pos) / (static_cast<double>(l.col) - static_cast<double>(first->col));
                have_dx = s.dx > 0.0;
            }
        }
    }
    if (first) {
        if (!have_dt || !have_dx)
            throw FormatError("trajectories: cannot recover dt/dx (need points on distinct rows and columns)");
        s.t0 = first->time - static_cast<double>(first->row) * s.dt;
        s.x0 = first->pos - static_cast<double>(first->col) * s.dx;
    }

    std::vector<Trajectory> out;
    for (std::size_t id : order_seen) {
        Trajectory t;
        t.vehicle_id = id;
        t.sampling = s;
        for (const auto& l : by_id[id]) t.points.push_back({l.row, l.col});
        t.cls = by_id[id].front().cls;
        std::sort(t.points.begin(), t.points.end(), [](const KeyPoint& a, const KeyPoint& b) { return a.row < b.row; });
        refit(t, order);
        out.push_back(std::move(t));
    }
    return out;
}

nlohmann::json trajectories_summary(std::span<const Trajectory> trajs) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["count"] = trajs.size();
    auto list = nlohmann::json::array();
    for (const auto& t : trajs) {
        list.push_back({{"vehicle_id", t.vehicle_id},
                        {"first_row", t.first_row()},
                        {"last_row", t.last_row()},
                        {"points", t.points.size()},
                        {"single_point", t.single_point()},
                        {"coefficients", t.coeffs},
                        {"fitted_velocity_kmh", t.velocity_kmh},
                        {"residual_rms", t.residual},
                        {"mean_amplitude", t.mean_amplitude},
                        {"entry_width", t.entry_width},
                        {"class", class_name(t.cls)}});
    }
    j["trajectories"] = list;
    return j;
}

std::string candidates_csv(std::span<const LineCandidate> c) {
    std::string out = "rho,theta,score,velocity_kmh,entry_row\n";
    for (const auto& l : c)
        out += format_double(l.rho) + "," + format_double(l.theta) + "," + format_double(l.score) + "," +
               format_double(l.velocity_kmh) + "," + format_double(l.entry_row) + "\n";
    return out;
}

nlohmann::json score_json(const MatchScore& s) {
    return {{"schema_version", 1},
            {"true_positive", s.true_positive},
            {"false_positive", s.false_positive},
            {"false_negative", s.false_negative},
            {"velocity_rmse_kmh", s.velocity_rmse}};
}

nlohmann::json quality_json(const QualityReport& q) {
    nlohmann::json j{{"schema_version", 1}, {"mse", q.mse}, {"ssim", q.ssim}};
    if (std::isinf(q.psnr_db)) j["psnr_db"] = "inf";
    else j["psnr_db"] = q.psnr_db;
    return j;
}

} // namespace dasflow
