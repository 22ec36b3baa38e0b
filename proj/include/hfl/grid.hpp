#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hfl {

using Field = std::vector<double>;

// Uniformly sampled interval [a, b] with n points.
struct Grid1D {
    double a = 0.0;
    double b = 1.0;
    std::size_t n = 2;

    Grid1D() = default;
    Grid1D(double a_, double b_, std::size_t n_);
    double h() const { return (b - a) / static_cast<double>(n - 1); }
    double x(std::size_t i) const { return a + h() * static_cast<double>(i); }
    std::vector<double> points() const;
    // Index of the sample equal to x (within 1e-9 h), or -1.
    long node_of(double x) const;
};

// Doubly periodic chart [0, L1) x [0, L2); flat index i1 * n2 + i2.
struct AngularGrid {
    std::size_t n1 = 8;
    std::size_t n2 = 8;
    double L1 = 1.0;
    double L2 = 1.0;

    AngularGrid() = default;
    AngularGrid(std::size_t n1_, std::size_t n2_, double L1_, double L2_);
    std::size_t size() const { return n1 * n2; }
    std::size_t index(std::size_t i1, std::size_t i2) const { return i1 * n2 + i2; }
    double theta1(std::size_t i1) const { return L1 * static_cast<double>(i1) / static_cast<double>(n1); }
    double theta2(std::size_t i2) const { return L2 * static_cast<double>(i2) / static_cast<double>(n2); }
    double cell_area() const { return (L1 / static_cast<double>(n1)) * (L2 / static_cast<double>(n2)); }
    bool operator==(const AngularGrid&) const = default;
};

template <class F>
Field sample(const AngularGrid& g, F&& f) {
    Field out(g.size());
    for (std::size_t i = 0; i < g.n1; ++i)
        for (std::size_t j = 0; j < g.n2; ++j) out[g.index(i, j)] = f(g.theta1(i), g.theta2(j));
    return out;
}

// Periodic trapezoid sum of w * f over the chart (w may be empty for 1).
double integrate_chart(const AngularGrid& g, std::span<const double> f, std::span<const double> w = {});

// First derivative on uniform samples: 4th-order central differences with
// one-sided 4th-order closures at both ends. Requires n >= 5.
Field fd4_derivative(std::span<const double> f, double h);
// Same along a strided line of a 2D array.
void fd4_derivative_strided(const double* f, double* df, std::size_t n, std::size_t stride, double h);

// Cubic Lagrange interpolation of uniform samples at x.
double interp_cubic(std::span<const double> y, double a, double h, double x);

// Composite quadrature on non-decreasing nodes. Repeated nodes mark a
// discontinuity (left and right values). Uniform runs use Simpson (3/8 on
// odd runs); runs of one interval fall back to the trapezoid rule.
double integrate(std::span<const double> x, std::span<const double> y);
double trapezoid(std::span<const double> y, double h);

double max_abs(std::span<const double> v);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace hfl
