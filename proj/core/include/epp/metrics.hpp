#pragma once

#include <optional>

#include "epp/image.hpp"

namespace epp {

struct QualityReport {
    double relative_error = 0.0;
    double psnr = 0.0;  // dB; +inf for identical images
    double mssim = 0.0;
    std::optional<double> noise_level;
};

/// ||x - truth||_2 / ||truth||_2.
double relative_error(const Image& x, const Image& truth);

/// Mean SSIM over all valid 11x11 windows (Gaussian weights, sigma 1.5,
/// K1 = 0.01, K2 = 0.03) for intensities spanning `range`.
double mssim(const Image& x, const Image& truth, double range = 1.0);

/// 10 log10(range^2 / MSE).
double psnr(const Image& x, const Image& truth, double range = 1.0);

QualityReport evaluate(const Image& x, const Image& truth, double range);

}  // namespace epp
