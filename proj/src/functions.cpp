#include "hfl/functions.hpp"

#include <cmath>

namespace hfl::fn {

double bump(double s) {
    double q = 1.0 - s * s;
    return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

double bump_derivative(double s) {
    double q = 1.0 - s * s;
    if (q <= 0.0) return 0.0;
    return std::exp(-1.0 / q) * (-2.0 * s / (q * q));
}

double bump_integral() {
    static const double value = [] {
        // Trapezoid converges super-algebraically for a flat-ended bump.
        const int n = 20000;
        const double h = 2.0 / n;
        double s = 0.0;
        for (int i = 1; i < n; ++i) s += bump(-1.0 + h * i);
        return s * h;
    }();
    return value;
}

double mollifier(double s) { return bump(s) / bump_integral(); }

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double a = std::exp(-1.0 / t);
    double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

double smooth_step_derivative(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    double a = std::exp(-1.0 / t);
    double b = std::exp(-1.0 / (1.0 - t));
    double s = a + b;
    return a * b * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / (s * s);
}

double plateau(double t) {
    double a = std::abs(t);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    return 1.0 - smooth_step(a - 1.0);
}

std::vector<Bump1D> bump_dictionary(double a, double b) {
    const double L = b - a;
    std::vector<Bump1D> out;
    for (double w : {0.08, 0.15, 0.25})
        for (double c : {0.3, 0.45, 0.55, 0.7}) out.push_back({a + c * L, w * L});
    return out;
}

}  // namespace hfl::fn
