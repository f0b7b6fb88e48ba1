#include "dasflow/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace dasflow::kernels::avx2 {

namespace {

double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

MinMax minmax(std::span<const double> x) {
    const std::size_t n = x.size();
    std::size_t i = 0;
    MinMax r{x[0], x[0]};
    if (n >= 4) {
        __m256d vmin = _mm256_loadu_pd(x.data());
        __m256d vmax = vmin;
        for (i = 4; i + 4 <= n; i += 4) {
            const __m256d v = _mm256_loadu_pd(x.data() + i);
            vmin = _mm256_min_pd(vmin, v);
            vmax = _mm256_max_pd(vmax, v);
        }
        alignas(32) double lo[4], hi[4];
        _mm256_store_pd(lo, vmin);
        _mm256_store_pd(hi, vmax);
        for (int k = 0; k < 4; ++k) {
            r.min = lo[k] < r.min ? lo[k] : r.min;
            r.max = hi[k] > r.max ? hi[k] : r.max;
        }
    }
    for (; i < n; ++i) {
        r.min = x[i] < r.min ? x[i] : r.min;
        r.max = x[i] > r.max ? x[i] : r.max;
    }
    return r;
}

void shift_divide(std::span<const double> x, double offset, double divisor, std::span<double> out) {
    const std::size_t n = x.size();
    const __m256d off = _mm256_set1_pd(offset);
    const __m256d dv = _mm256_set1_pd(divisor);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x.data() + i);
        _mm256_storeu_pd(out.data() + i, _mm256_div_pd(_mm256_sub_pd(v, off), dv));
    }
    for (; i < n; ++i) out[i] = (x[i] - offset) / divisor;
}

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::array<double, 5> moments(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    __m256d sx = _mm256_setzero_pd(), sy = sx, sxx = sx, syy = sx, sxy = sx;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x.data() + i);
        const __m256d vy = _mm256_loadu_pd(y.data() + i);
        sx = _mm256_add_pd(sx, vx);
        sy = _mm256_add_pd(sy, vy);
        sxx = _mm256_add_pd(sxx, _mm256_mul_pd(vx, vx));
        syy = _mm256_add_pd(syy, _mm256_mul_pd(vy, vy));
        sxy = _mm256_add_pd(sxy, _mm256_mul_pd(vx, vy));
    }
    std::array<double, 5> m{hsum(sx), hsum(sy), hsum(sxx), hsum(syy), hsum(sxy)};
    for (; i < n; ++i) {
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
    // Dot product of the contiguous window ext[2k+1 .. 2k+L] with the
    // reversed filter.
    alignas(32) double rev[64];
    if (taps > 64) {
        for (std::size_t k = 0; k < out.size(); ++k) {
            double acc = 0.0;
            const double* base = ext.data() + 2 * k + taps;
            for (std::size_t j = 0; j < taps; ++j) acc += filter[j] * base[-static_cast<std::ptrdiff_t>(j)];
            out[k] = acc;
        }
        return;
    }
    for (std::size_t j = 0; j < taps; ++j) rev[j] = filter[taps - 1 - j];
    const std::size_t vec = taps & ~std::size_t{3};
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double* window = ext.data() + 2 * k + 1;
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < vec; j += 4)
            acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_load_pd(rev + j), _mm256_loadu_pd(window + j)));
        double s = hsum(acc);
        for (std::size_t j = vec; j < taps; ++j) s += rev[j] * window[j];
        out[k] = s;
    }
}

inline __m256d deformation(const WheelSet& w, __m256d along, __m256d across2, __m256d depth2,
                           __m256d depth, __m256d scale, __m256d poisson, __m256d one) {
    const __m256d r2 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(along, along), across2), depth2);
    const __m256d r = _mm256_sqrt_pd(r2);
    const __m256d q = _mm256_div_pd(depth, r);
    const __m256d inner = _mm256_add_pd(q, _mm256_div_pd(poisson, _mm256_add_pd(one, q)));
    (void)w;
    return _mm256_mul_pd(scale, _mm256_mul_pd(_mm256_div_pd(along, r2), inner));
}

inline double scalar_deformation(const WheelSet& w, double along, double across) {
    const double r2 = along * along + across * across + w.depth * w.depth;
    const double r = std::sqrt(r2);
    const double q = w.depth / r;
    return w.scale * ((along / r2) * (q + w.poisson_term / (1.0 + q)));
}

void vehicle_response(const WheelSet& w, double first, double step, std::span<double> out) {
    const std::size_t n = out.size();
    const __m256d depth = _mm256_set1_pd(w.depth);
    const __m256d depth2 = _mm256_set1_pd(w.depth * w.depth);
    const __m256d scale = _mm256_set1_pd(w.scale);
    const __m256d poisson = _mm256_set1_pd(w.poisson_term);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d hg = _mm256_set1_pd(w.half_gauge);
    const __m256d vfirst = _mm256_set1_pd(first);
    const __m256d vstep = _mm256_set1_pd(step);
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    __m256d across2[4], along[4], weight[4];
    for (int k = 0; k < 4; ++k) {
        across2[k] = _mm256_set1_pd(w.across[k] * w.across[k]);
        along[k] = _mm256_set1_pd(w.along[k]);
        weight[k] = _mm256_set1_pd(w.weight[k]);
    }
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const double b = static_cast<double>(i);
        const __m256d idx = _mm256_set_pd(b + 3.0, b + 2.0, b + 1.0, b);
        const __m256d s = _mm256_add_pd(vfirst, _mm256_mul_pd(idx, vstep));
        const __m256d front = _mm256_add_pd(s, hg);
        const __m256d rear = _mm256_sub_pd(s, hg);
        __m256d k1 = _mm256_setzero_pd();
        __m256d k2 = _mm256_setzero_pd();
        for (int k = 0; k < 4; ++k) {
            k1 = _mm256_add_pd(k1, _mm256_mul_pd(weight[k],
                     deformation(w, _mm256_add_pd(front, along[k]), across2[k], depth2, depth, scale, poisson, one)));
            k2 = _mm256_add_pd(k2, _mm256_mul_pd(weight[k],
                     deformation(w, _mm256_add_pd(rear, along[k]), across2[k], depth2, depth, scale, poisson, one)));
        }
        const __m256d diff = _mm256_andnot_pd(sign_mask, _mm256_sub_pd(k2, k1));
        _mm256_storeu_pd(out.data() + i, _mm256_add_pd(_mm256_loadu_pd(out.data() + i), diff));
    }
    for (; i < n; ++i) {
        const double s = first + static_cast<double>(i) * step;
        double k1 = 0.0;
        double k2 = 0.0;
        for (int k = 0; k < 4; ++k) {
            k1 += w.weight[k] * scalar_deformation(w, s + w.half_gauge + w.along[k], w.across[k]);
            k2 += w.weight[k] * scalar_deformation(w, s - w.half_gauge + w.along[k], w.across[k]);
        }
        out[i] += std::fabs(k2 - k1);
    }
}

} // namespace

const KernelTable kTable{&minmax, &shift_divide, &sum_sq_diff, &moments, &analysis_filter,
                         &vehicle_response};

} // namespace dasflow::kernels::avx2
