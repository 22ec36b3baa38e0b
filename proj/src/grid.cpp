#include "hfl/grid.hpp"

#include <algorithm>
#include <cmath>

#include "hfl/error.hpp"
#include "hfl/kernels.hpp"

namespace hfl {

Grid1D::Grid1D(double a_, double b_, std::size_t n_) : a(a_), b(b_), n(n_) {
    if (!(b > a)) throw UsageError("Grid1D requires b > a");
    if (n < 2) throw UsageError("Grid1D requires n >= 2");
}

std::vector<double> Grid1D::points() const {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = x(i);
    return p;
}

long Grid1D::node_of(double xq) const {
    double r = (xq - a) / h();
    double k = std::round(r);
    if (std::abs(r - k) > 1e-9 || k < 0 || k > static_cast<double>(n - 1)) return -1;
    return static_cast<long>(k);
}

AngularGrid::AngularGrid(std::size_t n1_, std::size_t n2_, double L1_, double L2_)
    : n1(n1_), n2(n2_), L1(L1_), L2(L2_) {
    if (n1 < 4 || n2 < 4) throw UsageError("AngularGrid requires n1, n2 >= 4");
    if (!(L1 > 0 && L2 > 0)) throw UsageError("AngularGrid requires positive periods");
}

double integrate_chart(const AngularGrid& g, std::span<const double> f, std::span<const double> w) {
    const auto& k = kern::active();
    double s = w.empty() ? k.sum(f.data(), f.size()) : k.dot(f.data(), w.data(), f.size());
    return s * g.cell_area();
}

namespace {
void closures(const double* f, double* df, std::size_t n, std::size_t s, double h) {
    const double c = 1.0 / (12.0 * h);
    auto F = [&](std::size_t i) { return f[i * s]; };
    df[0] = (-25 * F(0) + 48 * F(1) - 36 * F(2) + 16 * F(3) - 3 * F(4)) * c;
    df[s] = (-3 * F(0) - 10 * F(1) + 18 * F(2) - 6 * F(3) + F(4)) * c;
    std::size_t m = n - 1;
    df[(m - 1) * s] = (3 * F(m) + 10 * F(m - 1) - 18 * F(m - 2) + 6 * F(m - 3) - F(m - 4)) * c;
    df[m * s] = (25 * F(m) - 48 * F(m - 1) + 36 * F(m - 2) - 16 * F(m - 3) + 3 * F(m - 4)) * c;
}
}  // namespace

Field fd4_derivative(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 5) throw UsageError("fd4_derivative needs at least 5 samples");
    Field df(n, 0.0);
    kern::active().stencil4(f.data(), df.data(), n, 1.0 / (12.0 * h));
    closures(f.data(), df.data(), n, 1, h);
    return df;
}

void fd4_derivative_strided(const double* f, double* df, std::size_t n, std::size_t stride, double h) {
    if (n < 5) throw UsageError("fd4_derivative needs at least 5 samples");
    if (stride == 1) {
        kern::active().stencil4(f, df, n, 1.0 / (12.0 * h));
    } else {
        const double c = 1.0 / (12.0 * h);
        for (std::size_t i = 2; i + 2 < n; ++i) {
            double s = f[(i - 2) * stride] - 8.0 * f[(i - 1) * stride];
            s = s + 8.0 * f[(i + 1) * stride];
            s = s - f[(i + 2) * stride];
            df[i * stride] = s * c;
        }
    }
    closures(f, df, n, stride, h);
}

double interp_cubic(std::span<const double> y, double a, double h, double x) {
    const long n = static_cast<long>(y.size());
    double r = (x - a) / h;
    long i = static_cast<long>(std::floor(r)) - 1;
    i = std::clamp(i, 0L, n - 4);
    double t = r - static_cast<double>(i);
    double l0 = -(t - 1) * (t - 2) * (t - 3) / 6.0;
    double l1 = t * (t - 2) * (t - 3) / 2.0;
    double l2 = -t * (t - 1) * (t - 3) / 2.0;
    double l3 = t * (t - 1) * (t - 2) / 6.0;
    return l0 * y[i] + l1 * y[i + 1] + l2 * y[i + 2] + l3 * y[i + 3];
}

namespace {
double simpson_run(const double* y, std::size_t m, double h) {
    // m intervals, m+1 samples
    if (m == 0) return 0.0;
    if (m == 1) return 0.5 * h * (y[0] + y[1]);
    auto simpson = [&](const double* v, std::size_t k) {
        double s = v[0] + v[k];
        for (std::size_t i = 1; i < k; i += 2) s += 4.0 * v[i];
        for (std::size_t i = 2; i < k; i += 2) s += 2.0 * v[i];
        return s * h / 3.0;
    };
    if (m % 2 == 0) return simpson(y, m);
    double tail = 3.0 * h / 8.0 * (y[m - 3] + 3 * y[m - 2] + 3 * y[m - 1] + y[m]);
    return (m > 3 ? simpson(y, m - 3) : 0.0) + tail;
}
}  // namespace

double integrate(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size()) throw UsageError("integrate: size mismatch");
    double total = 0.0;
    std::size_t start = 0;
    while (start + 1 < n) {
        if (x[start + 1] == x[start]) {
            ++start;
            continue;
        }
        double h = x[start + 1] - x[start];
        std::size_t end = start + 1;
        while (end + 1 < n) {
            double h2 = x[end + 1] - x[end];
            if (h2 == 0.0 || std::abs(h2 - h) > 1e-9 * h) break;
            ++end;
        }
        double hr = (x[end] - x[start]) / static_cast<double>(end - start);
        total += simpson_run(y.data() + start, end - start, hr);
        start = end;
    }
    return total;
}

double trapezoid(std::span<const double> y, double h) {
    if (y.size() < 2) return 0.0;
    double s = kern::active().sum(y.data(), y.size());
    return h * (s - 0.5 * (y.front() + y.back()));
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace hfl
