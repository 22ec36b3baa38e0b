#include "hfl/hf_approx.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hfl/error.hpp"
#include "hfl/functions.hpp"

namespace hfl::hf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::array<double, 3> kShift{1.0, 0.0, -1.0};

double eval_or(const PointFn& f, double x, std::size_t p, double fallback) { return f ? f(x, p) : fallback; }

Sym2 eval_or(const SymFn& f, double x, std::size_t p) { return f ? f(x, p) : Sym2{0.0, 0.0, 0.0}; }

// Nodes with the given step on each [breaks[i], breaks[i+1]].
std::vector<double> piecewise_nodes(const std::vector<double>& breaks, const std::vector<double>& steps) {
    std::vector<double> out{breaks.front()};
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double a = breaks[s], b = breaks[s + 1];
        if (!(b > a)) continue;
        const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / steps[s] - 1e-9)));
        for (std::size_t i = 1; i < n; ++i) out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n));
        out.push_back(b);
    }
    return out;
}

std::vector<std::pair<double, double>> merge(std::vector<std::pair<double, double>> w) {
    std::sort(w.begin(), w.end());
    std::vector<std::pair<double, double>> out;
    for (const auto& iv : w) {
        if (!out.empty() && iv.first <= out.back().second)
            out.back().second = std::max(out.back().second, iv.second);
        else
            out.push_back(iv);
    }
    return out;
}

double rho_eps(double x, double eps) { return fn::mollifier(x / eps) / eps; }
double drho_eps(double x, double eps) { return fn::bump_derivative(x / eps) / (fn::bump_integral() * eps * eps); }

}  // namespace

SolutionTrack::SolutionTrack(std::shared_ptr<const cons::Solution> s) : s_(std::move(s)) {
    std::size_t maxp = 0;
    for (std::size_t p : s_->points) maxp = std::max(maxp, p);
    slot_.assign(maxp + 1, -1);
    for (std::size_t k = 0; k < s_->points.size(); ++k) slot_[s_->points[k]] = static_cast<long>(k);
}

std::size_t SolutionTrack::interval(double u) const {
    const auto& x = s_->ubar;
    auto it = std::upper_bound(x.begin(), x.end(), u);
    long i = static_cast<long>(it - x.begin()) - 1;
    i = std::clamp(i, 0L, static_cast<long>(x.size()) - 2);
    while (i > 0 && x[static_cast<std::size_t>(i) + 1] == x[static_cast<std::size_t>(i)]) --i;
    return static_cast<std::size_t>(i);
}

namespace {
double hermite(double t, double h, double y0, double m0, double y1, double m1) {
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1;
}
}  // namespace

double SolutionTrack::value(double u, std::size_t p) const {
    const std::size_t i = interval(u), k = static_cast<std::size_t>(slot_.at(p));
    const double h = s_->ubar[i + 1] - s_->ubar[i], t = (u - s_->ubar[i]) / h;
    return hermite(t, h, s_->Phi[i][k], s_->dPhi[i][k], s_->Phi[i + 1][k], s_->dPhi[i + 1][k]);
}

double SolutionTrack::slope(double u, std::size_t p) const {
    const std::size_t i = interval(u), k = static_cast<std::size_t>(slot_.at(p));
    const double h = s_->ubar[i + 1] - s_->ubar[i], t = (u - s_->ubar[i]) / h;
    return hermite(t, h, s_->dPhi[i][k], s_->ddPhi[i][k], s_->dPhi[i + 1][k], s_->ddPhi[i + 1][k]);
}

double min_eigenvalue(const Sym2& g) {
    const double h = 0.5 * (g.a - g.d);
    return 0.5 * (g.a + g.d) - std::sqrt(h * h + g.b * g.b);
}

std::pair<double, double> OscillatoryFamily::amplitude(double u, std::size_t p) const {
    const double sf = eval_or(dust.sqrt_f, u, p, 0.0);
    const double dsf = eval_or(dust.dsqrt_f, u, p, 0.0);
    if (sf == 0.0 && dsf == 0.0) return {0.0, 0.0};
    const double Phi = dust.Phi(u, p), dPhi = dust.dPhi(u, p);
    const double r = sf / Phi, dr = dsf / Phi - sf * dPhi / (Phi * Phi);
    const double kn = k * n, sn = std::sin(kn * u), cs = std::cos(kn * u);
    return {2.0 * r * sn / kn, 2.0 * r * cs + 2.0 * dr * sn / kn};
}

Sym2 OscillatoryFamily::gamma(double u, std::size_t p) const {
    const Sym2 g = dust.gamma(u, p);
    const double s = amplitude(u, p).first;
    const double D = g.det();
    const double A = g.a + (D / g.d) * s;
    return {A, g.b, g.d - D * s / A};
}

Sym2 OscillatoryFamily::dgamma(double u, std::size_t p) const {
    const Sym2 g = dust.gamma(u, p), dg = eval_or(dust.dgamma, u, p);
    const auto [s, ds] = amplitude(u, p);
    const double D = g.det(), dD = dg.a * g.d + g.a * dg.d - 2.0 * g.b * dg.b;
    const double A = g.a + (D / g.d) * s;
    const double dA = dg.a + (dD / g.d - D * dg.d / (g.d * g.d)) * s + (D / g.d) * ds;
    return {dA, dg.b, dg.d - (dD * s + D * ds) / A + D * s * dA / (A * A)};
}

double OscillatoryFamily::dgamma_sq(double u, std::size_t p) const { return cons::dgamma_sq(gamma(u, p), dgamma(u, p)); }

double OscillatoryFamily::F(double u, std::size_t p) const {
    const double sf = eval_or(dust.sqrt_f, u, p, 0.0);
    if (sf == 0.0) return 0.0;
    const Sym2 g = dust.gamma(u, p), dg = eval_or(dust.dgamma, u, p);
    const double D = g.det(), E = (g.d * dg.a - g.a * dg.d) / D;
    const double kn = k * n;
    return (2.0 * sf * sf / k) * std::sin(2.0 * kn * u) + (4.0 / k) * E * sf * dust.Phi(u, p) * std::sin(kn * u);
}

double OscillatoryFamily::dF(double u, std::size_t p) const {
    const double sf = eval_or(dust.sqrt_f, u, p, 0.0);
    const double dsf = eval_or(dust.dsqrt_f, u, p, 0.0);
    if (sf == 0.0 && dsf == 0.0) return 0.0;
    const Sym2 g = dust.gamma(u, p), dg = eval_or(dust.dgamma, u, p), ddg = eval_or(dust.ddgamma, u, p);
    const double D = g.det(), dD = dg.a * g.d + g.a * dg.d - 2.0 * g.b * dg.b;
    const double num = g.d * dg.a - g.a * dg.d, dnum = g.d * ddg.a - g.a * ddg.d;
    const double E = num / D, dE = (dnum * D - num * dD) / (D * D);
    const double Phi = dust.Phi(u, p), dPhi = dust.dPhi(u, p);
    const double W = sf * Phi, dW = dsf * Phi + sf * dPhi;
    const double kn = k * n, f = sf * sf;
    const double s1 = std::sin(kn * u), c1 = std::cos(kn * u);
    const double s2 = std::sin(2.0 * kn * u), c2 = std::cos(2.0 * kn * u);
    return (4.0 * sf * dsf / k) * s2 + 4.0 * f * n * c2 + (4.0 / k) * (dE * W + E * dW) * s1 + 4.0 * n * E * W * c1;
}

OscillatoryFamily build_gamma_n(const DustData& d, double k, int n) {
    if (n < 1 || !(k > 0.0)) throw UsageError("build_gamma_n: need n >= 1 and k > 0");
    if (!d.gamma) throw UsageError("build_gamma_n: missing dust metric");
    if (d.sqrt_f && (!d.Phi || !d.dPhi)) throw UsageError("build_gamma_n: dust density needs Phi and dPhi");
    OscillatoryFamily fam;
    fam.n = n;
    fam.k = k;
    fam.dust = d;
    return fam;
}

double choose_k(const DustData& d, const std::vector<double>& nodes, std::size_t npoints, int n_min) {
    double sup_r = 0.0, min_eig = INFINITY;
    for (double u : nodes)
        for (std::size_t p = 0; p < npoints; ++p) {
            min_eig = std::min(min_eig, min_eigenvalue(d.gamma(u, p)));
            const double sf = eval_or(d.sqrt_f, u, p, 0.0);
            if (sf != 0.0) sup_r = std::max(sup_r, sf / d.Phi(u, p));
        }
    if (!(min_eig > 0.0)) throw NumericalError("choose_k: dust metric is not positive definite");
    double k = 8.0 * (sup_r + 1.0) / min_eig;
    for (int doubling = 0; doubling <= 20; ++doubling, k *= 2.0) {
        bool ok = true;
        for (std::size_t i = 0; i < nodes.size() && ok; ++i)
            for (std::size_t p = 0; p < npoints && ok; ++p) {
                const double sf = eval_or(d.sqrt_f, nodes[i], p, 0.0);
                if (sf == 0.0) continue;
                const Sym2 g = d.gamma(nodes[i], p);
                const double D = g.det(), smax = 2.0 * sf / (d.Phi(nodes[i], p) * k * n_min);
                for (double s : {smax, -smax}) {
                    const double A = g.a + (D / g.d) * s;
                    const Sym2 gn{A, g.b, g.d - D * s / A};
                    if (!(A > 0.0) || min_eigenvalue(gn) < 0.5 * min_eig) ok = false;
                }
            }
        if (ok) return k;
    }
    throw NumericalError("choose_k: positivity margin not reached within 20 doublings");
}

void require_resolved(const OscillatoryFamily& fam, const std::vector<double>& nodes, std::size_t npoints,
                      double per_period) {
    if (!fam.dust.sqrt_f) return;
    const double hmax = kPi / (fam.k * fam.n) / per_period;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double h = nodes[i + 1] - nodes[i];
        if (h <= hmax) continue;
        for (std::size_t p = 0; p < npoints; ++p) {
            const double mid = 0.5 * (nodes[i] + nodes[i + 1]);
            if (fam.dust.sqrt_f(nodes[i], p) != 0.0 || fam.dust.sqrt_f(nodes[i + 1], p) != 0.0 ||
                fam.dust.sqrt_f(mid, p) != 0.0) {
                std::ostringstream os;
                os << "oscillation under-resolved near ubar = " << nodes[i] << " (step " << h << " > " << hmax << ")";
                throw NumericalError(os.str(), nodes[i], static_cast<long>(p));
            }
        }
    }
}

double weak_defect_residual(const OscillatoryFamily& fam, const std::vector<double>& nodes, std::size_t npoints,
                            bool with_corrector) {
    require_resolved(fam, nodes, npoints);
    if (!fam.dust.sqrt_f) return 0.0;
    double sup = 0.0;
    for (double u : nodes)
        for (std::size_t p = 0; p < npoints; ++p) {
            const double sf = fam.dust.sqrt_f(u, p);
            if (sf == 0.0 && eval_or(fam.dust.dsqrt_f, u, p, 0.0) == 0.0) continue;
            const double Phi = fam.dust.Phi(u, p);
            const double q0 = cons::dgamma_sq(fam.dust.gamma(u, p), eval_or(fam.dust.dgamma, u, p));
            double r = (fam.dgamma_sq(u, p) - q0) * Phi * Phi - 4.0 * sf * sf;
            if (with_corrector) r -= fam.dF(u, p) / fam.n;
            sup = std::max(sup, std::abs(r));
        }
    return sup;
}

const cons::Solution& solve_phi_n(OscillatoryFamily& fam, const cons::Coefficients& omega,
                                  const std::vector<double>& nodes, const Field& Phi0, const Field& dPhi0) {
    require_resolved(fam, nodes, Phi0.size());
    cons::Coefficients c = omega;
    c.dgamma_sq = [&fam](double u, std::size_t p) { return fam.dgamma_sq(u, p); };
    fam.Phi = cons::solve_vacuum_constraint(c, nodes, Phi0, dPhi0);
    return fam.Phi;
}

std::vector<double> window_nodes(double a, double b, double lo, double hi, double h_in, double h_out) {
    lo = std::clamp(lo, a, b);
    hi = std::clamp(hi, a, b);
    return piecewise_nodes({a, lo, hi, b}, {h_out, h_in, h_out});
}

double zeta(int i, double u, double U) {
    const double z1 = 1.0 - fn::smooth_step((u - U / 4.0) / (U / 12.0));
    const double z3 = fn::smooth_step((u - 2.0 * U / 3.0) / (U / 12.0));
    switch (i) {
        case 0: return z1;
        case 1: return 1.0 - z1 - z3;
        case 2: return z3;
        default: throw UsageError("zeta: index must be 0, 1 or 2");
    }
}

double dzeta(int i, double u, double U) {
    const double w = U / 12.0;
    const double d1 = -fn::smooth_step_derivative((u - U / 4.0) / w) / w;
    const double d3 = fn::smooth_step_derivative((u - 2.0 * U / 3.0) / w) / w;
    switch (i) {
        case 0: return d1;
        case 1: return -d1 - d3;
        case 2: return d3;
        default: throw UsageError("dzeta: index must be 0, 1 or 2");
    }
}

Mollified mollify_measure(const cons::NullDustMeasure& nu, const cons::Coefficients& omega, double ustar, int m) {
    if (m < 1) throw UsageError("mollify_measure: m must be >= 1");
    if (!(ustar > 0.0)) throw UsageError("mollify_measure: need ustar > 0");
    cons::validate(nu, 0.0, ustar);
    Mollified out;
    out.m = m;
    out.ustar = ustar;
    const double eps = std::ldexp(1.0, -2 * m);
    out.eps = eps;
    for (const auto& at : nu.atoms) {
        if (at.ubar - 2.0 * eps < 0.0 || at.ubar + 2.0 * eps > ustar) {
            std::ostringstream os;
            os << "mollify_measure: atom at " << at.ubar << " too close to the boundary for eps = " << eps;
            throw UsageError(os.str());
        }
        out.windows.emplace_back(at.ubar - 2.0 * eps, at.ubar + 2.0 * eps);
    }
    if (nu.density) out.windows.emplace_back(0.0, ustar);
    out.windows = merge(out.windows);

    auto atoms = std::make_shared<std::vector<cons::Atom>>(nu.atoms);
    auto density = nu.density;
    auto Om = omega.omega, dlo = omega.dlog_omega;

    // g = sum_a m_a sum_i zeta_i rho_eps(t - u_a - alpha_i eps), plus the
    // density convolution; f_m = Omega^2 g.
    auto g_and_dg = [=](double t, std::size_t p) -> std::pair<double, double> {
        double g = 0.0, dg = 0.0;
        for (const auto& at : *atoms) {
            const double mass = at.mass[p];
            if (mass == 0.0) continue;
            for (int i = 0; i < 3; ++i) {
                const double x = t - at.ubar - kShift[static_cast<std::size_t>(i)] * eps;
                if (std::abs(x) >= eps) continue;
                const double z = zeta(i, t, ustar), dz = dzeta(i, t, ustar);
                g += mass * z * rho_eps(x, eps);
                dg += mass * (dz * rho_eps(x, eps) + z * drho_eps(x, eps));
            }
        }
        if (density) {
            const int N = 64;
            for (int i = 0; i < 3; ++i) {
                const double z = zeta(i, t, ustar), dz = dzeta(i, t, ustar);
                if (z == 0.0 && dz == 0.0) continue;
                double I = 0.0, dI = 0.0;
                // Trapezoid: the integrand vanishes to all orders at r = +-1.
                for (int j = 1; j < N; ++j) {
                    const double r = -1.0 + 2.0 * j / N;
                    const double s = t - kShift[static_cast<std::size_t>(i)] * eps - eps * r;
                    if (s < 0.0 || s > ustar) continue;
                    const double O = Om ? Om(s, p) : 1.0;
                    const double v = density(s, p) / (O * O);
                    I += fn::mollifier(r) * v;
                    dI += fn::bump_derivative(r) / fn::bump_integral() * v;
                }
                I *= 2.0 / N;
                dI *= 2.0 / N / eps;
                g += z * I;
                dg += dz * I + z * dI;
            }
        }
        return {g, dg};
    };
    auto omega2 = [=](double t, std::size_t p) {
        const double O = Om ? Om(t, p) : 1.0;
        return O * O;
    };
    auto dlog = [=](double t, std::size_t p) { return dlo ? dlo(t, p) : 0.0; };

    out.f = [=](double t, std::size_t p) { return omega2(t, p) * g_and_dg(t, p).first; };
    out.df = [=](double t, std::size_t p) {
        auto [g, dg] = g_and_dg(t, p);
        return omega2(t, p) * (2.0 * dlog(t, p) * g + dg);
    };
    out.sqrt_f = [=](double t, std::size_t p) { return std::sqrt(omega2(t, p) * std::max(0.0, g_and_dg(t, p).first)); };
    out.dsqrt_f = [=](double t, std::size_t p) {
        auto [g, dg] = g_and_dg(t, p);
        if (!(g > 1e-300)) return 0.0;
        const double O = std::sqrt(omega2(t, p));
        return O * (dlog(t, p) * std::sqrt(g) + 0.5 * dg / std::sqrt(g));
    };
    return out;
}

double pairing(const Mollified& f, const cons::Coefficients& omega, const cons::TestFunction& phi,
               const AngularGrid& chart) {
    double total = 0.0;
    for (const auto& [lo, hi] : f.windows) {
        const auto N = static_cast<std::size_t>(std::max(64.0, 2.0 * std::ceil((hi - lo) / (f.eps / 64.0))));
        std::vector<double> x(N + 1), y(N + 1);
        for (std::size_t i = 0; i <= N; ++i) x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(N);
        for (std::size_t p = 0; p < chart.size(); ++p) {
            const double ang = phi.angular.empty() ? 1.0 : phi.angular[p];
            if (ang == 0.0) continue;
            for (std::size_t i = 0; i <= N; ++i) {
                const double O = eval_or(omega.omega, x[i], p, 1.0);
                y[i] = phi.phi(x[i]) * f.f(x[i], p) / (O * O);
            }
            total += ang * chart.cell_area() * trapezoid(y, (hi - lo) / static_cast<double>(N));
        }
    }
    return total;
}

double pairing(const cons::NullDustMeasure& nu, const cons::Coefficients& omega, const cons::TestFunction& phi,
               const AngularGrid& chart, double ustar) {
    double total = 0.0;
    for (std::size_t p = 0; p < chart.size(); ++p) {
        const double ang = phi.angular.empty() ? 1.0 : phi.angular[p];
        double s = 0.0;
        for (const auto& at : nu.atoms) s += phi.phi(at.ubar) * at.mass[p];
        if (nu.density) {
            const std::size_t N = 4096;
            std::vector<double> x(N + 1), y(N + 1);
            for (std::size_t i = 0; i <= N; ++i) {
                x[i] = ustar * static_cast<double>(i) / static_cast<double>(N);
                const double O = eval_or(omega.omega, x[i], p, 1.0);
                y[i] = phi.phi(x[i]) * nu.density(x[i], p) / (O * O);
            }
            s += integrate(x, y);
        }
        total += ang * chart.cell_area() * s;
    }
    return total;
}

std::vector<double> mollifier_nodes(const Mollified& f, const cons::NullDustMeasure& nu, double h_out) {
    std::vector<double> breaks{0.0}, steps;
    for (const auto& [lo, hi] : f.windows) {
        if (lo > breaks.back()) {
            steps.push_back(h_out);
            breaks.push_back(lo);
        }
        steps.push_back(f.eps / 64.0);
        breaks.push_back(hi);
    }
    if (breaks.back() < f.ustar) {
        steps.push_back(h_out);
        breaks.push_back(f.ustar);
    }
    auto nodes = piecewise_nodes(breaks, steps);
    for (const auto& at : nu.atoms) {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), at.ubar);
        if (it != nodes.begin() && (it == nodes.end() || std::abs(*(it - 1) - at.ubar) < std::abs(*it - at.ubar))) --it;
        *it = at.ubar;
    }
    return nodes;
}

cons::Solution solve_phi_m_dust(const Mollified& f, const cons::Coefficients& c, const std::vector<double>& nodes,
                                const Field& Phi0, const Field& dPhi0) {
    cons::NullDustMeasure nu;
    nu.density = f.f;
    return cons::solve_constraint(c, nu, nodes, Phi0, dPhi0);
}

PhiGap phi_gap(const cons::Solution& smooth, const cons::Solution& glued, const cons::NullDustMeasure& nu) {
    if (smooth.points != glued.points) throw UsageError("phi_gap: solutions cover different points");
    const std::size_t K = glued.points.size(), N = glued.ubar.size();
    PhiGap g;
    std::vector<double> d2(N);
    Field sup_k(K, 0.0);
    std::size_t j = 0;
    for (std::size_t i = 0; i < N; ++i) {
        while (j + 1 < smooth.ubar.size() && smooth.ubar[j] < glued.ubar[i] - 1e-14) ++j;
        if (std::abs(smooth.ubar[j] - glued.ubar[i]) > 1e-12) throw UsageError("phi_gap: node sets differ");
        double dmax = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            g.sup = std::max(g.sup, std::abs(smooth.Phi[j][k] - glued.Phi[i][k]));
            const double dd = std::abs(smooth.dPhi[j][k] - glued.dPhi[i][k]);
            dmax = std::max(dmax, dd);
            sup_k[k] = std::max(sup_k[k], dd);
        }
        d2[i] = dmax * dmax;
        g.sup_slope = std::max(g.sup_slope, dmax);
    }
    g.l2_slope = std::sqrt(integrate(glued.ubar, d2));
    g.min_ratio = INFINITY;
    for (const auto& at : nu.atoms) {
        auto it = std::lower_bound(glued.ubar.begin(), glued.ubar.end(), at.ubar - 1e-12);
        const auto i = static_cast<std::size_t>(it - glued.ubar.begin());
        for (std::size_t k = 0; k < K; ++k) {
            const double J = std::abs(glued.dPhi[i][k] - glued.dPhi[i + 1][k]);
            if (J > 0.0) g.min_ratio = std::min(g.min_ratio, sup_k[k] / J);
        }
    }
    return g;
}

namespace {

cons::Coefficients with_gamma(const Background& bg) {
    cons::Coefficients c = bg.omega;
    if (bg.dgamma) {
        auto g = bg.gamma, dg = bg.dgamma;
        c.dgamma_sq = [g, dg](double u, std::size_t p) { return cons::dgamma_sq(g(u, p), dg(u, p)); };
    } else {
        c.dgamma_sq = nullptr;
    }
    return c;
}

bool has_empty_column(const cons::NullDustMeasure& nu, const AngularGrid& chart) {
    for (std::size_t i1 = 0; i1 < chart.n1; ++i1) {
        bool empty = true;
        for (std::size_t i2 = 0; i2 < chart.n2 && empty; ++i2)
            for (const auto& at : nu.atoms)
                if (at.mass[chart.index(i1, i2)] != 0.0) empty = false;
        if (empty) return true;
    }
    return false;
}

DustData dust_from(const Background& bg, const Mollified& f, std::shared_ptr<const cons::Solution> sol) {
    DustData d;
    d.gamma = bg.gamma;
    d.dgamma = bg.dgamma;
    d.ddgamma = bg.ddgamma;
    d.sqrt_f = f.sqrt_f;
    d.dsqrt_f = f.dsqrt_f;
    SolutionTrack tr(std::move(sol));
    d.Phi = [tr](double u, std::size_t p) { return tr.value(u, p); };
    d.dPhi = [tr](double u, std::size_t p) { return tr.slope(u, p); };
    std::ostringstream os;
    os << "mollified measure m=" << f.m << " eps=" << f.eps;
    d.provenance = os.str();
    return d;
}

}  // namespace

PipelineStage approx_pipeline(const cons::NullDustMeasure& nu, const Background& bg, int m, double n_scale) {
    if (nu.density) throw UsageError("approx_pipeline: only atomic measures are supported");
    if (!bg.gamma) throw UsageError("approx_pipeline: missing gamma_hat");
    if (!nu.atoms.empty() && !has_empty_column(nu, bg.chart))
        throw UsageError("approx_pipeline: measure must vanish on an angular strip");
    const std::size_t P = bg.chart.size();
    if (bg.Phi0.size() != P || bg.dPhi0.size() != P) throw UsageError("approx_pipeline: seed size mismatch");

    PipelineStage st;
    st.m = m;
    st.f = mollify_measure(nu, bg.omega, bg.ustar, m);
    const cons::Coefficients c = with_gamma(bg);
    const double h_out = bg.ustar / 256.0;

    // Coarse dust solve fixes k and the envelope scale.
    auto nodes0 = mollifier_nodes(st.f, {}, h_out);
    auto dust0 = std::make_shared<const cons::Solution>(solve_phi_m_dust(st.f, c, nodes0, bg.Phi0, bg.dPhi0));
    DustData d0 = dust_from(bg, st.f, dust0);
    st.k = choose_k(d0, nodes0, P);
    double sup_r = 0.0, sup_dr = 0.0;
    for (double u : nodes0)
        for (std::size_t p = 0; p < P; ++p) {
            const double sf = st.f.sqrt_f(u, p), dsf = st.f.dsqrt_f(u, p);
            const double Phi = d0.Phi(u, p), dPhi = d0.dPhi(u, p);
            sup_r = std::max(sup_r, sf / Phi);
            sup_dr = std::max(sup_dr, std::abs(dsf / Phi - sf * dPhi / (Phi * Phi)));
        }
    const double L = sup_r > 0.0 ? sup_dr / sup_r : 1.0;
    const double target = n_scale * std::ldexp(1.0, m) * L / st.k;
    st.n = 1;
    while (st.n < target) st.n *= 2;

    const double h_in = std::min(st.f.eps / 64.0, kPi / (st.k * st.n) / 32.0);
    std::vector<double> breaks{0.0}, steps;
    for (const auto& [lo, hi] : st.f.windows) {
        steps.push_back(h_out);
        breaks.push_back(lo);
        steps.push_back(h_in);
        breaks.push_back(hi);
    }
    steps.push_back(h_out);
    breaks.push_back(bg.ustar);
    st.nodes = piecewise_nodes(breaks, steps);
    for (const auto& at : nu.atoms) {
        auto it = std::lower_bound(st.nodes.begin(), st.nodes.end(), at.ubar);
        if (it != st.nodes.begin() && (it == st.nodes.end() || std::abs(*(it - 1) - at.ubar) < std::abs(*it - at.ubar)))
            --it;
        *it = at.ubar;
    }

    st.dust = std::make_shared<const cons::Solution>(solve_phi_m_dust(st.f, c, st.nodes, bg.Phi0, bg.dPhi0));
    st.family = build_gamma_n(dust_from(bg, st.f, st.dust), st.k, st.n);
    solve_phi_n(st.family, bg.omega, st.nodes, bg.Phi0, bg.dPhi0);
    return st;
}

std::vector<WeakRow> stage_pairings(const PipelineStage& st, const cons::NullDustMeasure& nu, const Background& bg,
                                    const std::vector<cons::TestFunction>& phis) {
    const std::size_t P = bg.chart.size(), N = st.nodes.size();
    const cons::Solution& vac = st.family.Phi;
    std::optional<cons::Solution> target;
    if (bg.dgamma) target = cons::solve_constraint(with_gamma(bg), nu, st.nodes, bg.Phi0, bg.dPhi0);

    // Per point: 1/4 Omega^-2 (|d gamma_n|^2 Phi_n^2) on the nodes, and the
    // background term on the glued target.
    std::vector<Field> osc(N, Field(P));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t p = 0; p < P; ++p) {
            const double u = vac.ubar[i];
            const double O = eval_or(bg.omega.omega, u, p, 1.0);
            osc[i][p] = 0.25 * st.family.dgamma_sq(u, p) * vac.Phi[i][p] * vac.Phi[i][p] / (O * O);
        }

    std::vector<WeakRow> rows;
    std::vector<double> y;
    for (std::size_t j = 0; j < phis.size(); ++j) {
        const auto& phi = phis[j];
        double lhs = 0.0;
        for (std::size_t p = 0; p < P; ++p) {
            const double ang = phi.angular.empty() ? 1.0 : phi.angular[p];
            if (ang == 0.0) continue;
            y.assign(N, 0.0);
            for (std::size_t i = 0; i < N; ++i) y[i] = phi.phi(vac.ubar[i]) * osc[i][p];
            double I = integrate(vac.ubar, y);
            if (target) {
                const auto& t = *target;
                y.assign(t.ubar.size(), 0.0);
                for (std::size_t i = 0; i < t.ubar.size(); ++i) {
                    const double u = t.ubar[i];
                    const double O = eval_or(bg.omega.omega, u, p, 1.0);
                    const double q = cons::dgamma_sq(bg.gamma(u, p), bg.dgamma(u, p));
                    y[i] = phi.phi(u) * 0.25 * q * t.Phi[i][p] * t.Phi[i][p] / (O * O);
                }
                I -= integrate(t.ubar, y);
            }
            lhs += ang * bg.chart.cell_area() * I;
        }
        WeakRow r;
        r.m = st.m;
        r.phi = j;
        r.lhs = lhs;
        r.pairing = pairing(nu, bg.omega, phi, bg.chart, bg.ustar);
        r.gap = lhs - r.pairing;
        rows.push_back(r);
    }
    return rows;
}

WeakCheck fit_weak_rows(std::vector<WeakRow> rows, std::size_t nphi) {
    WeakCheck w;
    w.rows = std::move(rows);
    w.fits.resize(nphi);
    for (std::size_t j = 0; j < nphi; ++j) {
        std::vector<double> xs, ys;
        for (const auto& r : w.rows)
            if (r.phi == j && r.gap != 0.0) {
                xs.push_back(std::ldexp(1.0, -r.m));
                ys.push_back(std::abs(r.gap));
            }
        if (xs.size() >= 4) w.fits[j] = fit_rate(xs, ys);
    }
    return w;
}

WeakCheck pipeline_weak_check(const std::vector<PipelineStage>& stages, const cons::NullDustMeasure& nu,
                              const Background& bg, const std::vector<cons::TestFunction>& phis) {
    std::vector<WeakRow> rows;
    for (const auto& st : stages) {
        auto r = stage_pairings(st, nu, bg, phis);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    return fit_weak_rows(std::move(rows), phis.size());
}

cons::MassFunctional pipeline_mass(const PipelineStage& st, const Background& bg, double delta) {
    const std::size_t P = bg.chart.size();
    std::vector<double> ubar;
    std::vector<Field> sq;
    for (double u : st.nodes) {
        Field row(P);
        for (std::size_t p = 0; p < P; ++p) {
            const double O = eval_or(bg.omega.omega, u, p, 1.0);
            row[p] = 0.25 * st.family.dgamma_sq(u, p) / (O * O);
        }
        ubar.push_back(u);
        sq.push_back(std::move(row));
        if (u >= delta) break;
    }
    return cons::christodoulou_mass(ubar, sq, delta);
}

}  // namespace hfl::hf
