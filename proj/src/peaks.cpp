#include "dasflow/detect.hpp"

namespace dasflow {

Extrema find_extrema(std::span<const double> v) {
    Extrema out;
    const std::size_t n = v.size();
    if (n < 3) return out;

    std::vector<int> s(n, 0);  // s[n - 1] is a zero sentinel
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = v[i + 1] - v[i];
        s[i] = (d > 0.0) - (d < 0.0);
    }
    // Flat steps inherit the direction of whatever follows them.
    for (std::size_t i = n - 1; i-- > 0;)
        if (s[i] == 0) s[i] = s[i + 1] >= 0 ? 1 : -1;

    for (std::size_t i = 0; i + 2 < n; ++i) {
        const int r = s[i + 1] - s[i];
        if (r == -2) out.crests.push_back(i + 1);
        else if (r == 2) out.troughs.push_back(i + 1);
    }
    return out;
}

std::size_t half_height_width(std::span<const double> v, std::size_t index) {
    const double half = v[index] / 2.0;
    if (!(v[index] > half)) return 0;
    std::size_t lo = index, hi = index;
    while (lo > 0 && v[lo - 1] > half) --lo;
    while (hi + 1 < v.size() && v[hi + 1] > half) ++hi;
    return hi - lo + 1;
}

std::vector<Peak> find_peaks(std::span<const double> v, double min_height) {
    std::vector<Peak> peaks;
    for (std::size_t i : find_extrema(v).crests) {
        if (v[i] < min_height) continue;
        peaks.push_back({i, v[i], half_height_width(v, i)});
    }
    return peaks;
}

} // namespace dasflow
