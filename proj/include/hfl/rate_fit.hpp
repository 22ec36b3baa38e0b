#pragma once

#include <span>
#include <vector>

namespace hfl {

// Least-squares line through (log x, log y).
struct RateFit {
    std::vector<double> xs;
    std::vector<double> ys;
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms of log-residuals
    double slope_halfwidth = 0.0;  // 95% half-width of the slope estimate
};

RateFit fit_rate(std::span<const double> xs, std::span<const double> ys);

// True when ys never increases along the sequence.
bool monotone_decreasing(std::span<const double> ys);

}  // namespace hfl
