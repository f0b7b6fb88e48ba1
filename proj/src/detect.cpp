#include "dasflow/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dasflow {

std::vector<Peak> separate_peaks(std::span<const Peak> peaks, double distance) {
    std::vector<std::size_t> order(peaks.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return peaks[a].height > peaks[b].height; });
    std::vector<Peak> kept;
    for (const auto i : order) {
        const bool clear = std::none_of(kept.begin(), kept.end(), [&](const Peak& k) {
            return std::fabs(static_cast<double>(k.index) - static_cast<double>(peaks[i].index)) < distance;
        });
        if (clear) kept.push_back(peaks[i]);
    }
    std::sort(kept.begin(), kept.end(), [](const Peak& a, const Peak& b) { return a.index < b.index; });
    return kept;
}

std::vector<EntryEvent> detect_entries(const WaterfallMatrix& m, const DetectConfig& cfg) {
    if (cfg.entry_col >= m.cols())
        throw std::invalid_argument("detect: entry column " + std::to_string(cfg.entry_col) +
                                    " out of range (n = " + std::to_string(m.cols()) + ")");
    const auto column = m.column(cfg.entry_col);
    const auto smoothed = cfg.filter ? butterworth_lowpass(column, cfg.butterworth) : column;

    auto peaks = find_peaks(smoothed, cfg.min_height);
    if (cfg.min_separation > 0.0) peaks = separate_peaks(peaks, cfg.min_separation / m.dt());

    std::vector<EntryEvent> events;
    for (const auto& p : peaks)
        events.push_back({events.size() + 1, p.index, cfg.entry_col, p});
    return events;
}

} // namespace dasflow
