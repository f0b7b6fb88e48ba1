#include "dasflow/errors.hpp"
#include "dasflow/track.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dasflow {

std::vector<double> polyfit(std::span<const double> t, std::span<const double> x, int order) {
    if (order < 0) throw std::invalid_argument("polyfit: order must be >= 0");
    if (t.size() != x.size()) throw std::invalid_argument("polyfit: abscissa/ordinate size mismatch");
    const std::size_t n = t.size();
    const std::size_t p = static_cast<std::size_t>(order) + 1;

    std::vector<double> sorted(t.begin(), t.end());
    std::sort(sorted.begin(), sorted.end());
    const auto distinct = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    if (distinct < p)
        throw NumericError("polyfit: rank deficient (" + std::to_string(distinct) +
                           " distinct abscissae for order " + std::to_string(order) + ")");

    // Column-major Vandermonde, columns equilibrated to unit norm.
    std::vector<double> a(n * p);
    std::vector<double> scale(p);
    for (std::size_t j = 0; j < p; ++j) {
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = std::pow(t[i], static_cast<double>(j));
            a[j * n + i] = v;
            norm += v * v;
        }
        scale[j] = norm > 0.0 ? std::sqrt(norm) : 1.0;
        for (std::size_t i = 0; i < n; ++i) a[j * n + i] /= scale[j];
    }
    std::vector<double> b(x.begin(), x.end());

    for (std::size_t k = 0; k < p; ++k) {
        double* col = a.data() + k * n;
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += col[i] * col[i];
        norm = std::sqrt(norm);
        if (norm == 0.0) throw NumericError("polyfit: rank deficient design matrix");
        const double alpha = col[k] > 0.0 ? -norm : norm;
        std::vector<double> v(col + k, col + n);
        v[0] -= alpha;
        double vv = 0.0;
        for (double e : v) vv += e * e;
        if (vv == 0.0) continue;
        auto reflect = [&](double* target) {
            double dot = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * target[k + i];
            const double f = 2.0 * dot / vv;
            for (std::size_t i = 0; i < v.size(); ++i) target[k + i] -= f * v[i];
        };
        for (std::size_t j = k; j < p; ++j) reflect(a.data() + j * n);
        reflect(b.data());
    }

    double rmax = 0.0;
    for (std::size_t k = 0; k < p; ++k) rmax = std::max(rmax, std::fabs(a[k * n + k]));
    std::vector<double> w(p);
    for (std::size_t k = p; k-- > 0;) {
        const double r = a[k * n + k];
        if (std::fabs(r) <= 1e-13 * rmax) throw NumericError("polyfit: rank deficient design matrix");
        double s = b[k];
        for (std::size_t j = k + 1; j < p; ++j) s -= a[j * n + k] * w[j];
        w[k] = s / r;
    }
    for (std::size_t j = 0; j < p; ++j) w[j] /= scale[j];
    return w;
}

double polyval(std::span<const double> coeffs, double t) {
    double acc = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * t + coeffs[j];
    return acc;
}

double polyder(std::span<const double> coeffs, double t) {
    double acc = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 1;) acc = acc * t + static_cast<double>(j) * coeffs[j];
    return acc;
}

double residual_rms(std::span<const double> coeffs, std::span<const double> t, std::span<const double> x) {
    if (t.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double e = x[i] - polyval(coeffs, t[i]);
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(t.size()));
}

} // namespace dasflow
