#include "hfl/plane_wave.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hfl/error.hpp"
#include "hfl/functions.hpp"
#include "hfl/ode.hpp"

namespace hfl::pw {

using std::numbers::pi;

Seed make_seed(const std::string& name) {
    Seed s;
    s.name = name;
    if (name == "cosine") {
        s.k = [](double x) { return 1.0 + 0.5 * std::cos(2 * pi * x); };
        s.dk = [](double x) { return -pi * std::sin(2 * pi * x); };
        s.lo = 0.0;
        s.hi = 0.5;
    } else if (name == "bump") {
        s.k = [](double x) { return fn::bump(2 * x); };
        s.dk = [](double x) { return 2 * fn::bump_derivative(2 * x); };
    } else if (name == "poly") {
        s.k = [](double x) {
            double q = 1 - 4 * x * x;
            return q > 0 ? q * q * q : 0.0;
        };
        s.dk = [](double x) {
            double q = 1 - 4 * x * x;
            return q > 0 ? -24 * x * q * q : 0.0;
        };
    } else {
        throw UsageError("unknown seed '" + name + "' (expected cosine, bump or poly)");
    }
    return s;
}

double seed_energy(const Seed& k) {
    const std::size_t n = 200000;
    Field y(n + 1);
    const double h = (k.hi - k.lo) / n;
    std::vector<double> x(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        x[i] = k.lo + h * i;
        double d = k.dk(x[i]);
        y[i] = d * d;
    }
    return integrate(x, y);
}

Seed normalize_shell_seed(const Seed& k) {
    double c = 1.0 / std::sqrt(seed_energy(k));
    Seed s = k;
    s.k = [f = k.k, c](double x) { return c * f(x); };
    s.dk = [f = k.dk, c](double x) { return c * f(x); };
    return s;
}

Profile burnett_profile(double lambda, const Seed& k) {
    if (!(lambda > 0)) throw UsageError("burnett_profile: lambda must be positive");
    Profile p;
    p.lambda = lambda;
    p.G = [k, lambda](double x) { return lambda * k.k(x) * std::sin(x / lambda); };
    p.dG = [k, lambda](double x) {
        return lambda * k.dk(x) * std::sin(x / lambda) + k.k(x) * std::cos(x / lambda);
    };
    return p;
}

Profile shell_profile(double lambda, const Seed& k, double offset) {
    if (!(lambda > 0)) throw UsageError("shell_profile: lambda must be positive");
    Profile p;
    p.lambda = lambda;
    const double r = std::sqrt(lambda);
    p.G = [k, lambda, r, offset](double x) { return r * k.k((x - offset) / lambda); };
    p.dG = [k, lambda, r, offset](double x) { return k.dk((x - offset) / lambda) / r; };
    return p;
}

Field make_burnett_G(double lambda, const Seed& k, const Grid1D& grid) {
    Profile p = burnett_profile(lambda, k);
    Field G(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) G[i] = p.G(grid.x(i));
    return G;
}

Field make_shell_G(double lambda, const Seed& k, const Grid1D& grid, double offset) {
    if (lambda * (k.hi - k.lo) / grid.h() < 32.0) {
        std::ostringstream os;
        os << "make_shell_G: grid spacing " << grid.h() << " does not resolve lambda = " << lambda
           << " (need 32 samples across the support)";
        throw UsageError(os.str());
    }
    Profile p = shell_profile(lambda, k, offset);
    Field G(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) G[i] = p.G(grid.x(i));
    return G;
}

namespace {

void check_positive(double H, double x, std::size_t i) {
    if (!(H > 0.0)) {
        std::ostringstream os;
        os << "solve_H: H reaches zero near ubar = " << x;
        throw NumericalError(os.str(), x, static_cast<long>(i));
    }
}

HSolution integrate_nodes(const Fn& coef, const std::vector<double>& nodes) {
    // y = (H, H'), H'' = -coef(x) H
    if (nodes.size() < 2) throw UsageError("solve_H: need at least two nodes");
    HSolution s;
    s.x = nodes;
    s.H.resize(nodes.size());
    s.dH.resize(nodes.size());
    s.ddH.resize(nodes.size());
    auto f = [&](double x, const std::array<double, 2>& y) { return std::array<double, 2>{y[1], -coef(x) * y[0]}; };
    std::array<double, 2> y{1.0, 0.0};
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i > 0) {
            y = rk4_step<2>(f, nodes[i - 1], y, nodes[i] - nodes[i - 1]);
            check_positive(y[0], nodes[i], i);
        }
        s.H[i] = y[0];
        s.dH[i] = y[1];
        s.ddH[i] = -coef(nodes[i]) * y[0];
    }
    return s;
}

std::vector<double> halve(const std::vector<double>& nodes) {
    std::vector<double> out;
    out.reserve(2 * nodes.size());
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        out.push_back(nodes[i]);
        out.push_back(0.5 * (nodes[i] + nodes[i + 1]));
    }
    out.push_back(nodes.back());
    return out;
}

}  // namespace

HSolution solve_H(const Fn& dG, const std::vector<double>& nodes, bool richardson) {
    Fn coef = [&dG](double x) {
        double d = dG(x);
        return 0.25 * d * d;
    };
    HSolution s = integrate_nodes(coef, nodes);
    if (richardson) {
        HSolution f = integrate_nodes(coef, halve(nodes));
        double e = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) e = std::max(e, std::abs(s.H[i] - f.H[2 * i]));
        s.richardson = e / 15.0;
    }
    return s;
}

HSolution solve_H(const Field& G, const Grid1D& grid) {
    if (grid.n != G.size()) throw UsageError("solve_H: sample count does not match grid");
    if (grid.n < 5) throw UsageError("solve_H: need at least 5 samples");
    const double h = grid.h();
    Field dG = fd4_derivative(G, h);
    Field c(dG.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.25 * dG[i] * dG[i];
    HSolution s;
    const std::size_t m = (grid.n - 1) / 2 + 1;
    s.x.resize(m);
    s.H.resize(m);
    s.dH.resize(m);
    s.ddH.resize(m);
    double H = 1.0, P = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        std::size_t i = 2 * j;
        if (j > 0) {
            std::size_t i0 = i - 2, i1 = i - 1;
            const double step = 2 * h;
            double k1H = P, k1P = -c[i0] * H;
            double k2H = P + 0.5 * step * k1P, k2P = -c[i1] * (H + 0.5 * step * k1H);
            double k3H = P + 0.5 * step * k2P, k3P = -c[i1] * (H + 0.5 * step * k2H);
            double k4H = P + step * k3P, k4P = -c[i] * (H + step * k3H);
            H += step / 6.0 * (k1H + 2 * k2H + 2 * k3H + k4H);
            P += step / 6.0 * (k1P + 2 * k2P + 2 * k3P + k4P);
            check_positive(H, grid.x(i), i);
        }
        s.x[j] = grid.x(i);
        s.H[j] = H;
        s.dH[j] = P;
        s.ddH[j] = -c[i] * H;
    }
    return s;
}

HSolution solve_H_averaged(const Seed& k, const std::vector<double>& nodes) {
    Fn coef = [&k](double x) {
        double v = k.k(x);
        return v * v / 8.0;
    };
    return integrate_nodes(coef, nodes);
}

std::vector<double> uniform_nodes(double a, double b, std::size_t intervals) {
    std::vector<double> x(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) x[i] = a + (b - a) * static_cast<double>(i) / intervals;
    x.back() = b;
    return x;
}

std::vector<double> pulse_nodes(double a, double b, double c, double w, double step_in, double step_out) {
    double l = std::clamp(c - w, a, b), r = std::clamp(c + w, a, b);
    std::vector<double> out;
    auto seg = [&](double s, double e, double step) {
        if (e <= s) return;
        std::size_t n = static_cast<std::size_t>(std::ceil((e - s) / step));
        auto v = uniform_nodes(s, e, std::max<std::size_t>(n, 1));
        if (!out.empty()) v.erase(v.begin());
        out.insert(out.end(), v.begin(), v.end());
    };
    seg(a, l, step_out);
    seg(l, r, step_in);
    seg(r, b, step_out);
    return out;
}

Field ricci_uu(const Field& dG, const Field& H, const Field& ddH) {
    Field r(H.size());
    for (std::size_t i = 0; i < H.size(); ++i) {
        if (!(H[i] > 0.0)) throw NumericalError("ricci_uu: H must be positive", 0.0, static_cast<long>(i));
        r[i] = -0.5 * dG[i] * dG[i] - 2.0 * ddH[i] / H[i];
    }
    return r;
}

Field ricci_uu_stencil(const Field& G, const Field& H, double h) {
    Field dG = fd4_derivative(G, h);
    Field ddH = fd4_derivative(fd4_derivative(H, h), h);
    return ricci_uu(dG, H, ddH);
}

WeakLimit weak_limit_measure(const std::function<Profile(double)>& family, const Fn& phi, double a, double b,
                             const std::vector<double>& lambdas, double limit, int per_scale) {
    WeakLimit w;
    w.lambdas = lambdas;
    w.limit = limit;
    for (double lam : lambdas) {
        Profile p = family(lam);
        std::size_t n = static_cast<std::size_t>(std::ceil((b - a) / lam * per_scale));
        n = std::max<std::size_t>(n, 2000);
        n += n % 2;
        auto x = uniform_nodes(a, b, n);
        Field y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            double d = p.dG(x[i]);
            y[i] = d * d * phi(x[i]);
        }
        double v = integrate(x, y);
        w.pairings.push_back(v);
        w.gaps.push_back(std::abs(v - limit));
    }
    bool positive = std::all_of(w.gaps.begin(), w.gaps.end(), [](double g) { return g > 0.0; });
    if (lambdas.size() >= 4 && positive) w.fit = fit_rate(w.lambdas, w.gaps);
    return w;
}

namespace {
double interp_linear(const std::vector<double>& x, const Field& y, double t) {
    if (t <= x.front()) return y.front();
    if (t >= x.back()) return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    double s = (t - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + s * (y[i] - y[i - 1]);
}
}  // namespace

std::optional<Jump> jump_detect(const HSolution& s, double window) {
    std::size_t best = 0;
    double peak = 0.0;
    for (std::size_t i = 0; i < s.ddH.size(); ++i)
        if (std::abs(s.ddH[i]) > peak) {
            peak = std::abs(s.ddH[i]);
            best = i;
        }
    if (peak == 0.0) return std::nullopt;
    Jump j;
    j.location = s.x[best];
    j.magnitude = interp_linear(s.x, s.dH, j.location + window) - interp_linear(s.x, s.dH, j.location - window);
    return j;
}

}  // namespace hfl::pw
