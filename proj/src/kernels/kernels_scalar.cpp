#include "dasflow/kernels.hpp"

#include <cmath>

namespace dasflow::kernels::scalar {

namespace {

MinMax minmax(std::span<const double> x) {
    MinMax r{x[0], x[0]};
    for (double v : x) {
        r.min = v < r.min ? v : r.min;
        r.max = v > r.max ? v : r.max;
    }
    return r;
}

void shift_divide(std::span<const double> x, double offset, double divisor, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - offset) / divisor;
}

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::array<double, 5> moments(std::span<const double> x, std::span<const double> y) {
    std::array<double, 5> m{};
    for (std::size_t i = 0; i < x.size(); ++i) {
        m[0] += x[i];
        m[1] += y[i];
        m[2] += x[i] * x[i];
        m[3] += y[i] * y[i];
        m[4] += x[i] * y[i];
    }
    return m;
}

void analysis_filter(std::span<const double> ext, std::span<const double> filter,
                     std::span<double> out) {
    const std::size_t taps = filter.size();
    for (std::size_t k = 0; k < out.size(); ++k) {
        double acc = 0.0;
        const double* base = ext.data() + 2 * k + taps;
        for (std::size_t j = 0; j < taps; ++j) acc += filter[j] * base[-static_cast<std::ptrdiff_t>(j)];
        out[k] = acc;
    }
}

inline double deformation(const WheelSet& w, double along, double across) {
    const double r2 = along * along + across * across + w.depth * w.depth;
    const double r = std::sqrt(r2);
    const double q = w.depth / r;
    return w.scale * ((along / r2) * (q + w.poisson_term / (1.0 + q)));
}

void vehicle_response(const WheelSet& w, double first, double step, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double s = first + static_cast<double>(i) * step;
        double k1 = 0.0;
        double k2 = 0.0;
        for (int wheel = 0; wheel < 4; ++wheel) {
            k1 += w.weight[wheel] * deformation(w, s + w.half_gauge + w.along[wheel], w.across[wheel]);
            k2 += w.weight[wheel] * deformation(w, s - w.half_gauge + w.along[wheel], w.across[wheel]);
        }
        out[i] += std::fabs(k2 - k1);
    }
}

} // namespace

const KernelTable kTable{&minmax, &shift_divide, &sum_sq_diff, &moments, &analysis_filter,
                         &vehicle_response};

} // namespace dasflow::kernels::scalar
