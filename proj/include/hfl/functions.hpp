#pragma once

#include <vector>

namespace hfl::fn {

// exp(-1/(1-s^2)) on (-1, 1), zero outside.
double bump(double s);
double bump_derivative(double s);
// Bump normalised to unit integral.
double mollifier(double s);
double bump_integral();

// Smooth step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);
double smooth_step_derivative(double t);
// Smooth plateau: 1 on [-1, 1], 0 outside [-2, 2].
double plateau(double t);

// Compactly supported test function on (c - w, c + w).
struct Bump1D {
    double c = 0.0;
    double w = 1.0;
    double operator()(double x) const { return bump((x - c) / w); }
    double derivative(double x) const { return bump_derivative((x - c) / w) / w; }
};

// 3 widths x 4 centres of bumps compactly inside (a, b).
std::vector<Bump1D> bump_dictionary(double a, double b);

}  // namespace hfl::fn
