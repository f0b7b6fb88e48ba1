#include "dasflow/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dasflow {

namespace {

double bilinear(const WaterfallMatrix& m, double x, double y) {
    if (x < 0.0 || y < 0.0) return 0.0;
    const double xmax = static_cast<double>(m.cols() - 1);
    const double ymax = static_cast<double>(m.rows() - 1);
    if (x > xmax || y > ymax) return 0.0;
    const auto c0 = static_cast<std::size_t>(x), r0 = static_cast<std::size_t>(y);
    const std::size_t c1 = std::min(c0 + 1, m.cols() - 1), r1 = std::min(r0 + 1, m.rows() - 1);
    const double fx = x - static_cast<double>(c0), fy = y - static_cast<double>(r0);
    const double top = m.at(r0, c0) * (1.0 - fx) + m.at(r0, c1) * fx;
    const double bottom = m.at(r1, c0) * (1.0 - fx) + m.at(r1, c1) * fx;
    return top * (1.0 - fy) + bottom * fy;
}

} // namespace

Sinogram radon_transform(const WaterfallMatrix& m, std::span<const double> angles) {
    if (angles.empty()) throw std::invalid_argument("radon: empty angle list");
    Sinogram s;
    s.angles.assign(angles.begin(), angles.end());
    const double cx = static_cast<double>(m.cols() - 1) / 2.0;
    const double cy = static_cast<double>(m.rows() - 1) / 2.0;
    const double reach = std::ceil(std::hypot(cx, cy)) + 1.0;
    s.half = reach;
    s.offsets = 2 * static_cast<std::size_t>(reach) + 1;
    s.values.assign(s.angles.size() * s.offsets, 0.0);
    const auto steps = static_cast<long>(reach);

    for (std::size_t a = 0; a < s.angles.size(); ++a) {
        const double cs = std::cos(s.angles[a]), sn = std::sin(s.angles[a]);
        for (std::size_t o = 0; o < s.offsets; ++o) {
            const double rho = s.offset_of(o);
            const double bx = cx + rho * cs, by = cy + rho * sn;
            // Clip the ray parameter to the image box before sampling.
            double t_lo = -static_cast<double>(steps), t_hi = static_cast<double>(steps);
            auto clip = [&](double base, double dir, double limit) {
                if (std::fabs(dir) < 1e-12) {
                    if (base < -1e-9 || base > limit + 1e-9) t_hi = t_lo - 1.0;
                    return;
                }
                double a = (0.0 - base) / dir, b = (limit - base) / dir;
                if (a > b) std::swap(a, b);
                t_lo = std::max(t_lo, a);
                t_hi = std::min(t_hi, b);
            };
            clip(bx, -sn, 2.0 * cx);
            clip(by, cs, 2.0 * cy);
            double sum = 0.0;
            for (long t = static_cast<long>(std::floor(t_lo)); t <= static_cast<long>(std::ceil(t_hi)); ++t) {
                const double u = static_cast<double>(t);
                sum += bilinear(m, bx - u * sn, by + u * cs);
            }
            s.values[a * s.offsets + o] = sum;
        }
    }
    return s;
}

std::vector<double> stripe_angles(const Sampling& s, double min_kmh, double max_kmh, std::size_t count) {
    if (!(min_kmh > 0.0 && max_kmh > min_kmh)) throw std::invalid_argument("radon: need 0 < min < max speed");
    if (count < 2) throw std::invalid_argument("radon: need at least 2 angles");
    auto theta = [&](double kmh) { return std::numbers::pi - std::atan(kmh / 3.6 * s.dt / s.dx); };
    const double lo = theta(max_kmh), hi = theta(min_kmh);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return out;
}

std::vector<LineCandidate> radon_lines(const WaterfallMatrix& m, const RadonConfig& cfg) {
    std::vector<double> angles;
    if (cfg.full_range) {
        angles.resize(cfg.angle_count);
        for (std::size_t i = 0; i < cfg.angle_count; ++i)
            angles[i] = std::numbers::pi * static_cast<double>(i) / static_cast<double>(cfg.angle_count);
    } else {
        angles = stripe_angles(m.sampling(), cfg.min_kmh, cfg.max_kmh, cfg.angle_count);
    }
    const auto sino = radon_transform(m, angles);
    const double peak = *std::max_element(sino.values.begin(), sino.values.end());
    if (!(peak > 0.0)) return {};
    const double floor = cfg.relative_threshold * peak;
    const double cx = static_cast<double>(m.cols() - 1) / 2.0;
    const double cy = static_cast<double>(m.rows() - 1) / 2.0;

    const long na = static_cast<long>(sino.angles.size()), no = static_cast<long>(sino.offsets);
    std::vector<LineCandidate> out;
    for (long a = 0; a < na; ++a) {
        for (long o = 0; o < no; ++o) {
            const double v = sino.at(static_cast<std::size_t>(a), static_cast<std::size_t>(o));
            if (v < floor) continue;
            bool keep = true;
            for (long da = -1; da <= 1 && keep; ++da) {
                for (long d = -1; d <= 1; ++d) {
                    if (da == 0 && d == 0) continue;
                    const long qa = a + da, qo = o + d;
                    if (qa < 0 || qa >= na || qo < 0 || qo >= no) continue;
                    const double u = sino.at(static_cast<std::size_t>(qa), static_cast<std::size_t>(qo));
                    const bool earlier = qa < a || (qa == a && qo < o);
                    if (u > v || (u == v && earlier)) {
                        keep = false;
                        break;
                    }
                }
            }
            if (!keep) continue;
            LineCandidate c;
            c.theta = sino.angles[static_cast<std::size_t>(a)];
            c.rho = sino.offset_of(static_cast<std::size_t>(o));
            c.score = v;
            // Offsets are measured from the centre: shift to the corner origin.
            describe_line(c, m.sampling(), cx, cy);
            c.rho += cx * std::cos(c.theta) + cy * std::sin(c.theta);
            if (cfg.full_range && !(c.velocity_kmh >= cfg.min_kmh && c.velocity_kmh <= cfg.max_kmh)) continue;
            out.push_back(c);
        }
    }
    return out;
}

} // namespace dasflow
