#pragma once

#include "dasflow/waterfall.hpp"

#include <span>
#include <string>
#include <vector>

namespace dasflow {

struct DenoiseConfig {
    std::string wavelet = "db4";
    int levels = 4;
    double threshold = 0.15;  // lambda
    double mix = 0.5;         // a: 0 = hard, 1 = soft
};

struct QualityReport {
    double mse = 0.0;
    double psnr_db = 0.0;  // +inf when mse == 0
    double ssim = 1.0;
};

void validate(const DenoiseConfig& cfg);

// Global (x - min) / (max - min). Throws std::invalid_argument("degenerate range")
// on a constant matrix.
WaterfallMatrix minmax_normalize(const WaterfallMatrix& m);

// Mixed hard/soft threshold: coefficients inside (-lambda, lambda) are
// zeroed, the rest are pulled toward zero by a * lambda.
inline double shrink(double w, double lambda, double a) noexcept {
    if (w >= lambda) return w - a * lambda;
    if (w <= -lambda) return w + a * lambda;
    return 0.0;
}

// Shrinks every detail band of a 1-D signal and reconstructs. No clamping.
std::vector<double> denoise_signal(std::span<const double> signal, const DenoiseConfig& cfg);

// Per-column (along time) denoising of a normalized matrix; output clamped to [0, 1].
WaterfallMatrix wavelet_denoise(const WaterfallMatrix& m, const DenoiseConfig& cfg);

// MSE, PSNR against peak value `peak`, and single-window SSIM with
// C1 = (0.01 peak)^2, C2 = (0.03 peak)^2, C3 = C2 / 2.
QualityReport quality_metrics(const WaterfallMatrix& reference, const WaterfallMatrix& test,
                              double peak = 1.0);
QualityReport quality_metrics(std::span<const double> reference, std::span<const double> test,
                              double peak = 1.0);

} // namespace dasflow
