#include "hfl/gowdy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hfl/error.hpp"

namespace hfl::gowdy {

using std::numbers::pi;

namespace {

double series(int nu, double x) {
    // sum_k (-1)^k (x/2)^{2k+nu} / (k! (k+nu)!)
    double q = -0.25 * x * x;
    double term = 1.0;
    for (int i = 1; i <= nu; ++i) term *= 0.5 * x / i;
    double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * (k + nu));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

double hankel(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    double P = 0.0, Q = 0.0;
    double a = 1.0, prev = 1e300;
    for (int k = 0; k < 60; ++k) {
        if (k > 0) a *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * x);
        double mag = std::abs(a);
        if (mag > prev) break;
        prev = mag;
        int s = (k / 2) % 2 == 0 ? 1 : -1;
        if (k % 2 == 0)
            P += s * a;
        else
            Q += s * a;
        if (mag < 1e-17) break;
    }
    double chi = x - (0.5 * nu + 0.25) * pi;
    return std::sqrt(2.0 / (pi * x)) * (P * std::cos(chi) - Q * std::sin(chi));
}

}  // namespace

double bessel_j(int order, double x) {
    if (x < 0.0) throw UsageError("bessel_j: x must be non-negative");
    if (order < 0 || order > 2) throw UsageError("bessel_j: order must be 0, 1 or 2");
    if (x <= 12.0) return series(order, x);
    if (order < 2) return hankel(order, x);
    return 2.0 / x * hankel(1, x) - hankel(0, x);
}

double P_at(int n, double A, double tau, double theta) {
    return A / std::sqrt(static_cast<double>(n)) * bessel_j(0, n * std::exp(-tau)) * std::sin(n * theta);
}

namespace {
// alpha_n = a cos(2 n theta) + b
void alpha_parts(int n, double A, double tau, double& a, double& b) {
    const double x = n * std::exp(-tau);
    const double j0 = bessel_j(0, x), j1 = bessel_j(1, x), j2 = bessel_j(2, x);
    a = -0.5 * A * A * std::exp(-tau) * j1 * j0;
    b = -0.25 * A * A * n * std::exp(-2 * tau) * (j0 * j0 + 2 * j1 * j1 - j0 * j2);
}
}  // namespace

double alpha_at(int n, double A, double tau, double theta) {
    double a, b;
    alpha_parts(n, A, tau, a, b);
    return a * std::cos(2 * n * theta) + b;
}

double alpha_gap_sup_theta(int n, double A, double tau) {
    double a, b;
    alpha_parts(n, A, tau, a, b);
    return std::abs(a) + std::abs(b + A * A * std::exp(-tau) / pi);
}

double alpha_gap_sup(int n, double A, double t0, double t1) {
    const double wavelength = 2 * pi / (n * std::exp(-t0));
    const std::size_t m = static_cast<std::size_t>(std::ceil((t1 - t0) / wavelength * 16.0)) + 1;
    double s = 0.0;
    for (std::size_t i = 0; i <= m; ++i) s = std::max(s, alpha_gap_sup_theta(n, A, t0 + (t1 - t0) * i / m));
    return s;
}

namespace {
void require_resolved(int n, const Grid1D& tau, const Grid1D& theta) {
    const double wt = 2 * pi / (n * std::exp(-tau.a));
    const double wth = pi / n;
    if (tau.h() > wt / 16.0 || theta.h() > wth / 16.0) {
        std::ostringstream os;
        os << "gowdy: grid does not resolve n = " << n << " with 16 samples per oscillation";
        throw UsageError(os.str());
    }
}
}  // namespace

Family eval_family(int n, double A, const Grid1D& tau, const Grid1D& theta) {
    if (n < 1) throw UsageError("gowdy: n must be >= 1");
    require_resolved(n, tau, theta);
    Family f{tau, theta, Field(tau.n * theta.n), Field(tau.n * theta.n)};
    for (std::size_t i = 0; i < tau.n; ++i)
        for (std::size_t j = 0; j < theta.n; ++j) {
            f.P[i * theta.n + j] = P_at(n, A, tau.x(i), theta.x(j));
            f.alpha[i * theta.n + j] = alpha_at(n, A, tau.x(i), theta.x(j));
        }
    return f;
}

namespace {
MetricBlock block_from(const Grid1D& tau, const Grid1D& theta, const Field& P, const Field& alpha) {
    MetricBlock m;
    m.labels = {"tau", "theta", "sigma", "delta"};
    m.active = {0, 1};
    m.axis0 = tau;
    m.axis1 = theta;
    m.diagonal = true;
    m.allocate();
    for (std::size_t i = 0; i < tau.n; ++i)
        for (std::size_t j = 0; j < theta.n; ++j) {
            std::size_t p = i * theta.n + j;
            double t = tau.x(i);
            double c = std::exp(0.5 * (t - alpha[p]));
            m.set(0, 0, p, -c * std::exp(-2 * t));
            m.set(1, 1, p, c);
            m.set(2, 2, p, std::exp(-t + P[p]));
            m.set(3, 3, p, std::exp(-t - P[p]));
        }
    return m;
}
}  // namespace

MetricBlock metric_block(int n, double A, const Grid1D& tau, const Grid1D& theta) {
    Family f = eval_family(n, A, tau, theta);
    return block_from(tau, theta, f.P, f.alpha);
}

MetricBlock limit_block(double A, const Grid1D& tau, const Grid1D& theta) {
    Field P(tau.n * theta.n, 0.0), alpha(tau.n * theta.n);
    for (std::size_t i = 0; i < tau.n; ++i)
        for (std::size_t j = 0; j < theta.n; ++j) alpha[i * theta.n + j] = -A * A * std::exp(-tau.x(i)) / pi;
    return block_from(tau, theta, P, alpha);
}

namespace {
double window_max(const MetricBlock& m, const RicciResult& r, double t0, double t1, double s0, double s1) {
    double v = 0.0;
    for (std::size_t i = 0; i < m.axis0.n; ++i) {
        double t = m.axis0.x(i);
        if (t < t0 - 1e-12 || t > t1 + 1e-12) continue;
        for (std::size_t j = 0; j < m.axis1.n; ++j) {
            double s = m.axis1.x(j);
            if (s < s0 - 1e-12 || s > s1 + 1e-12) continue;
            std::size_t p = i * m.axis1.n + j;
            for (int a = 0; a < 4; ++a)
                for (int b = a; b < 4; ++b) v = std::max(v, std::abs(r.ric.g[a][b][p]));
        }
    }
    return v;
}
}  // namespace

VacuumResidual vacuum_residual(int n, double A, const Grid1D& tau, const Grid1D& theta) {
    const double wt = 4 * tau.h(), ws = 4 * theta.h();
    const double t0 = tau.a + wt, t1 = tau.b - wt, s0 = theta.a + ws, s1 = theta.b - ws;
    MetricBlock m = metric_block(n, A, tau, theta);
    RicciResult r = spacetime_ricci(m);
    Grid1D tf(tau.a, tau.b, 2 * tau.n - 1), sf(theta.a, theta.b, 2 * theta.n - 1);
    MetricBlock mf = metric_block(n, A, tf, sf);
    RicciResult rf = spacetime_ricci(mf);
    VacuumResidual out;
    out.residual = window_max(m, r, t0, t1, s0, s1);
    out.residual_fine = window_max(mf, rf, t0, t1, s0, s1);
    out.order = std::log2(out.residual / out.residual_fine);
    out.richardson = out.residual_fine / 15.0;
    out.underresolved = r.underresolved;
    return out;
}

LimitEinstein limit_einstein(double A, double tau) {
    const double h = 1e-2;
    MetricBlock one;
    one.labels = {"tau", "theta", "sigma", "delta"};
    one.nactive = 1;
    one.active = {0, -1};
    one.axis0 = Grid1D(tau - 8 * h, tau + 8 * h, 17);
    one.diagonal = true;
    one.allocate();
    for (std::size_t i = 0; i < one.axis0.n; ++i) {
        double t = one.axis0.x(i);
        double c = std::exp(0.5 * (t + A * A * std::exp(-t) / pi));
        one.set(0, 0, i, -c * std::exp(-2 * t));
        one.set(1, 1, i, c);
        one.set(2, 2, i, std::exp(-t));
        one.set(3, 3, i, std::exp(-t));
    }
    RicciResult r = spacetime_ricci(one);
    MetricBlock G = einstein_tensor(one, r);
    const std::size_t c = 8;
    LimitEinstein out;
    out.G_tautau = G.g[0][0][c];
    out.G_thetatheta = G.g[1][1][c];
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            if (!(a == b && a < 2)) out.max_other = std::max(out.max_other, std::abs(G.g[a][b][c]));
    out.target_tautau = A * A * std::exp(-tau) / (4 * pi);
    out.target_thetatheta = A * A * std::exp(tau) / (4 * pi);
    // d tau = e^tau (du + dubar) / 2, d theta = (dubar - du) / 2
    const double et = std::exp(tau);
    const double tu = 0.5 * et, tub = 0.5 * et, su = -0.5, sub = 0.5;
    out.G_uu = out.G_tautau * tu * tu + out.G_thetatheta * su * su + 2 * G.g[0][1][c] * tu * su;
    out.G_ubub = out.G_tautau * tub * tub + out.G_thetatheta * sub * sub + 2 * G.g[0][1][c] * tub * sub;
    out.G_uub = out.G_tautau * tu * tub + out.G_thetatheta * su * sub + G.g[0][1][c] * (tu * sub + su * tub);
    return out;
}

double metric_gap(int n, double A, const Grid1D& tau, const Grid1D& theta) {
    MetricBlock g = metric_block(n, A, tau, theta);
    MetricBlock l = limit_block(A, tau, theta);
    double v = 0.0;
    for (int a = 0; a < 4; ++a) v = std::max(v, max_abs_diff(g.g[a][a], l.g[a][a]));
    return v;
}

}  // namespace hfl::gowdy
