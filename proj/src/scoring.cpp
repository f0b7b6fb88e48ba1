#include "dasflow/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace dasflow {

std::vector<Detection> as_detections(std::span<const LineCandidate> c) {
    std::vector<Detection> out;
    out.reserve(c.size());
    for (const auto& l : c) out.push_back({l.entry_row, l.velocity_kmh});
    return out;
}

std::vector<Detection> as_detections(std::span<const Trajectory> t) {
    std::vector<Detection> out;
    out.reserve(t.size());
    for (const auto& tr : t) out.push_back({static_cast<double>(tr.first_row()), tr.velocity_kmh});
    return out;
}

MatchScore score_method(std::span<const Detection> found, const sim::GroundTruth& truth, double tol_rows,
                        double tol_kmh) {
    if (!(tol_rows >= 0.0 && tol_kmh >= 0.0)) throw std::invalid_argument("score: tolerances must be >= 0");
    struct Target {
        double row, kmh;
    };
    std::vector<Target> targets;
    for (const auto& v : truth.vehicles)
        if (auto r = v.entry_row()) targets.push_back({static_cast<double>(*r), v.velocity * 3.6});

    // (row distance, found index, target index) for every admissible pair.
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < found.size(); ++i) {
        if (!std::isfinite(found[i].entry_row) || !std::isfinite(found[i].velocity_kmh)) continue;
        for (std::size_t j = 0; j < targets.size(); ++j) {
            const double dr = std::fabs(found[i].entry_row - targets[j].row);
            const double dv = std::fabs(found[i].velocity_kmh - targets[j].kmh);
            if (dr <= tol_rows && dv <= tol_kmh) pairs.emplace_back(dr, i, j);
        }
    }
    std::sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
        // Equal distances: prefer the closer speed so labels do not matter.
        const double va = std::fabs(found[std::get<1>(a)].velocity_kmh - targets[std::get<2>(a)].kmh);
        const double vb = std::fabs(found[std::get<1>(b)].velocity_kmh - targets[std::get<2>(b)].kmh);
        if (va != vb) return va < vb;
        return std::tie(std::get<2>(a), std::get<1>(a)) < std::tie(std::get<2>(b), std::get<1>(b));
    });

    std::vector<bool> used_found(found.size(), false), used_target(targets.size(), false);
    MatchScore s;
    double sq = 0.0;
    for (const auto& [dr, i, j] : pairs) {
        if (used_found[i] || used_target[j]) continue;
        used_found[i] = used_target[j] = true;
        ++s.true_positive;
        const double dv = found[i].velocity_kmh - targets[j].kmh;
        sq += dv * dv;
    }
    s.false_positive = found.size() - s.true_positive;
    s.false_negative = targets.size() - s.true_positive;
    s.velocity_rmse = s.true_positive ? std::sqrt(sq / static_cast<double>(s.true_positive)) : 0.0;
    return s;
}

} // namespace dasflow
