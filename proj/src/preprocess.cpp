#include "dasflow/preprocess.hpp"

#include "dasflow/kernels.hpp"
#include "dasflow/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dasflow {

void validate(const DenoiseConfig& cfg) {
    if (cfg.levels < 1) throw std::invalid_argument("denoise: levels must be >= 1");
    if (!(cfg.threshold >= 0.0)) throw std::invalid_argument("denoise: threshold must be >= 0");
    if (!(cfg.mix >= 0.0 && cfg.mix <= 1.0)) throw std::invalid_argument("denoise: mix must be in [0, 1]");
    (void)wavelet::by_name(cfg.wavelet);
}

WaterfallMatrix minmax_normalize(const WaterfallMatrix& m) {
    const auto range = kernels::minmax(m.values());
    if (!(range.max > range.min)) throw std::invalid_argument("degenerate range");
    std::vector<double> out(m.values().size());
    kernels::shift_divide(m.values(), range.min, range.max - range.min, out);
    return m.with_values(std::move(out));
}

std::vector<double> denoise_signal(std::span<const double> signal, const DenoiseConfig& cfg) {
    validate(cfg);
    const auto& w = wavelet::by_name(cfg.wavelet);
    auto d = wavelet::wavedec(signal, w, cfg.levels);
    for (auto& band : d.details)
        for (double& c : band) c = shrink(c, cfg.threshold, cfg.mix);
    return wavelet::waverec(d, w);
}

WaterfallMatrix wavelet_denoise(const WaterfallMatrix& m, const DenoiseConfig& cfg) {
    validate(cfg);
    constexpr double kSlack = 1e-9;
    for (double v : m.values())
        if (v < -kSlack || v > 1.0 + kSlack)
            throw std::invalid_argument("wavelet_denoise: input must be normalized to [0, 1]");
    const auto& w = wavelet::by_name(cfg.wavelet);
    if (cfg.levels > wavelet::max_level(m.rows(), w))
        throw std::invalid_argument("wavelet_denoise: column of " + std::to_string(m.rows()) +
                                    " rows is shorter than the " + cfg.wavelet + " support at level " +
                                    std::to_string(cfg.levels));

    std::vector<double> out(m.values().size());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        const auto col = m.column(c);
        const auto clean = denoise_signal(col, cfg);
        for (std::size_t r = 0; r < m.rows(); ++r)
            out[r * m.cols() + c] = std::clamp(clean[r], 0.0, 1.0);
    }
    return m.with_values(std::move(out));
}

QualityReport quality_metrics(std::span<const double> reference, std::span<const double> test,
                              double peak) {
    if (reference.size() != test.size()) throw std::invalid_argument("quality_metrics: shape mismatch");
    if (reference.empty()) throw std::invalid_argument("quality_metrics: empty input");
    if (!(peak > 0.0)) throw std::invalid_argument("quality_metrics: peak must be > 0");
    const double n = static_cast<double>(reference.size());

    QualityReport q;
    q.mse = kernels::sum_sq_diff(reference, test) / n;
    q.psnr_db = q.mse == 0.0 ? std::numeric_limits<double>::infinity()
                             : 10.0 * std::log10(peak * peak / q.mse);

    const auto mo = kernels::moments(reference, test);
    const double mu_x = mo[0] / n;
    const double mu_y = mo[1] / n;
    const double var_x = std::max(0.0, mo[2] / n - mu_x * mu_x);
    const double var_y = std::max(0.0, mo[3] / n - mu_y * mu_y);
    const double cov = mo[4] / n - mu_x * mu_y;
    const double c1 = (0.01 * peak) * (0.01 * peak);
    const double c2 = (0.03 * peak) * (0.03 * peak);
    const double c3 = c2 / 2.0;
    const double sd_xy = std::sqrt(var_x * var_y);
    const double luminance = (2.0 * mu_x * mu_y + c1) / (mu_x * mu_x + mu_y * mu_y + c1);
    const double contrast = (2.0 * sd_xy + c2) / (var_x + var_y + c2);
    const double structure = (cov + c3) / (sd_xy + c3);
    q.ssim = std::clamp(luminance * contrast * structure, -1.0, 1.0);
    return q;
}

QualityReport quality_metrics(const WaterfallMatrix& reference, const WaterfallMatrix& test,
                              double peak) {
    if (reference.rows() != test.rows() || reference.cols() != test.cols())
        throw std::invalid_argument("quality_metrics: shape mismatch");
    return quality_metrics(reference.values(), test.values(), peak);
}

} // namespace dasflow
