#include "hfl/rate_fit.hpp"

#include <cmath>

#include "hfl/error.hpp"

namespace hfl {

RateFit fit_rate(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw UsageError("fit_rate: length mismatch");
    if (xs.size() < 4) throw UsageError("fit_rate: need at least 4 points");
    const std::size_t n = xs.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw UsageError("fit_rate: entries must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) throw UsageError("fit_rate: abscissae must not all coincide");
    RateFit r;
    r.xs.assign(xs.begin(), xs.end());
    r.ys.assign(ys.begin(), ys.end());
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = ly[i] - (r.intercept + r.slope * lx[i]);
        ss += e * e;
    }
    r.residual = std::sqrt(ss / n);
    // Student t quantiles for n - 2 degrees of freedom, clamped at the normal value.
    static const double t975[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228};
    std::size_t dof = n - 2;
    double t = dof <= 10 ? t975[dof - 1] : 1.96;
    r.slope_halfwidth = t * std::sqrt(ss / static_cast<double>(dof) / sxx);
    return r;
}

bool monotone_decreasing(std::span<const double> ys) {
    for (std::size_t i = 1; i < ys.size(); ++i)
        if (ys[i] > ys[i - 1]) return false;
    return true;
}

}  // namespace hfl
