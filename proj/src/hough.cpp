#include "dasflow/baselines.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dasflow {

double HoughAccumulator::theta_of(std::size_t k) const {
    return std::numbers::pi * static_cast<double>(k) / static_cast<double>(theta_bins);
}

double HoughAccumulator::rho_of(std::size_t r) const {
    return -rho_max + 2.0 * rho_max * static_cast<double>(r) / static_cast<double>(rho_bins - 1);
}

HoughAccumulator hough_accumulate(const WaterfallMatrix& m, const HoughConfig& cfg) {
    if (!(cfg.binarize > 0.0)) throw std::invalid_argument("hough: binarize threshold must be > 0");
    if (cfg.vote_threshold == 0) throw std::invalid_argument("hough: vote threshold must be > 0");
    if (cfg.theta_bins < 2) throw std::invalid_argument("hough: need at least 2 theta bins");
    if (cfg.rho_bins == 1) throw std::invalid_argument("hough: need at least 2 rho bins");

    HoughAccumulator acc;
    acc.theta_bins = cfg.theta_bins;
    acc.rho_max = std::hypot(static_cast<double>(m.cols() - 1), static_cast<double>(m.rows() - 1));
    acc.rho_bins = cfg.rho_bins != 0 ? cfg.rho_bins
                                     : 2 * static_cast<std::size_t>(std::ceil(acc.rho_max)) + 1;
    if (acc.rho_max == 0.0) acc.rho_max = 1.0;
    acc.votes.assign(acc.theta_bins * acc.rho_bins, 0);

    std::vector<double> cs(acc.theta_bins), sn(acc.theta_bins);
    for (std::size_t k = 0; k < acc.theta_bins; ++k) {
        cs[k] = std::cos(acc.theta_of(k));
        sn[k] = std::sin(acc.theta_of(k));
    }
    const double to_bin = static_cast<double>(acc.rho_bins - 1) / (2.0 * acc.rho_max);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (!(row[c] >= cfg.binarize)) continue;
            const double x = static_cast<double>(c), y = static_cast<double>(r);
            for (std::size_t k = 0; k < acc.theta_bins; ++k) {
                const double rho = x * cs[k] + y * sn[k];
                const auto bin = static_cast<std::size_t>(std::lround((rho + acc.rho_max) * to_bin));
                ++acc.votes[k * acc.rho_bins + bin];
            }
        }
    }
    return acc;
}

void describe_line(LineCandidate& c, const Sampling& s, double origin_col, double origin_row) {
    const double cs = std::cos(c.theta), sn = std::sin(c.theta);
    // col = c0 - tan(theta) * row
    c.velocity_kmh = (cs == 0.0 ? std::numeric_limits<double>::infinity() : -sn / cs) * s.dx / s.dt * 3.6;
    c.entry_row = sn == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                            : origin_row + (c.rho + origin_col * cs) / sn;
}

std::vector<LineCandidate> hough_lines(const WaterfallMatrix& m, const HoughConfig& cfg) {
    const auto acc = hough_accumulate(m, cfg);
    const long kt = static_cast<long>(acc.theta_bins), kr = static_cast<long>(acc.rho_bins);
    std::vector<LineCandidate> out;
    for (long k = 0; k < kt; ++k) {
        for (long r = 0; r < kr; ++r) {
            const std::size_t v = acc.votes[static_cast<std::size_t>(k * kr + r)];
            if (v < cfg.vote_threshold) continue;
            bool keep = true;
            for (long dk = -1; dk <= 1 && keep; ++dk) {
                for (long dr = -1; dr <= 1; ++dr) {
                    if (dk == 0 && dr == 0) continue;
                    const long nk = k + dk, nr = r + dr;
                    if (nk < 0 || nk >= kt || nr < 0 || nr >= kr) continue;
                    const std::size_t u = acc.votes[static_cast<std::size_t>(nk * kr + nr)];
                    // Equal neighbours: only the first in raster order survives.
                    const bool earlier = nk < k || (nk == k && nr < r);
                    if (u > v || (u == v && earlier)) {
                        keep = false;
                        break;
                    }
                }
            }
            if (!keep) continue;
            LineCandidate c;
            c.theta = acc.theta_of(static_cast<std::size_t>(k));
            c.rho = acc.rho_of(static_cast<std::size_t>(r));
            c.score = static_cast<double>(v);
            describe_line(c, m.sampling());
            if (!(c.velocity_kmh >= cfg.min_kmh && c.velocity_kmh <= cfg.max_kmh)) continue;
            out.push_back(c);
        }
    }
    return out;
}

} // namespace dasflow
