#include "hfl/acceptance.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "hfl/char_pipeline.hpp"
#include "hfl/comp_compact.hpp"
#include "hfl/constraints.hpp"
#include "hfl/error.hpp"
#include "hfl/functions.hpp"
#include "hfl/gowdy.hpp"
#include "hfl/hf_approx.hpp"
#include "hfl/plane_wave.hpp"
#include "hfl/rate_fit.hpp"
#include "hfl/shell.hpp"

namespace hfl::acc {

using io::fmt;

bool Report::pass() const {
    if (!error.empty() || checks.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void Report::at_most(const std::string& n, double v, double bound) { checks.push_back({n, v <= bound, v, "<=", bound}); }

void Report::at_least(const std::string& n, double v, double bound) { checks.push_back({n, v >= bound, v, ">=", bound}); }

void Report::flag(const std::string& n, bool ok) { checks.push_back({n, ok, ok ? 1.0 : 0.0, "flag", 1.0}); }

std::string Report::line() const {
    std::ostringstream os;
    std::size_t ok = 0;
    for (const auto& c : checks) ok += c.pass ? 1 : 0;
    os << "criterion " << criterion << " " << name << ": " << (pass() ? "PASS" : "FAIL") << " (" << ok << "/"
       << checks.size() << " checks";
    if (!error.empty()) os << ", error: " << error;
    for (const auto& c : checks)
        if (!c.pass) {
            os << ", first failure: " << c.name << " = " << c.value;
            if (c.relation != "flag") os << " (need " << c.relation << " " << c.threshold << ")";
            break;
        }
    os << ")";
    return os.str();
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
        const long long a = parse_int(s.substr(0, dots)), b = parse_int(s.substr(dots + 2));
        if (b < a || b - a > 100000) throw UsageError("bad range '" + s + "'");
        for (long long i = a; i <= b; ++i) out.push_back(static_cast<int>(i));
        return out;
    }
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(parse_int(item)));
    if (out.empty()) throw UsageError("empty integer list");
    return out;
}

double parse_real(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw UsageError("'" + s + "' is not a number");
    }
    if (pos != s.size() || !std::isfinite(v)) throw UsageError("'" + s + "' is not a finite number");
    return v;
}

long long parse_int(const std::string& s) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw UsageError("'" + s + "' is not an integer");
    }
    if (pos != s.size()) throw UsageError("'" + s + "' is not an integer");
    return v;
}

namespace {

constexpr double kPi = std::numbers::pi;

double real(const Params& p, const std::string& k) { return parse_real(p.at(k)); }
int integer(const Params& p, const std::string& k) { return static_cast<int>(parse_int(p.at(k))); }
std::vector<int> ints(const Params& p, const std::string& k) { return parse_int_list(p.at(k)); }

void positive_int_guard(int v, const std::string& what) {
    if (v < 1) throw UsageError(what + " must be positive");
}

// ---------------------------------------------------------------- 1. Burnett

Report burnett(const Params& p) {
    Report r;
    const auto js = ints(p, "lambda-seq");
    const int nphi = integer(p, "nphi");
    const int per_scale = integer(p, "per-scale");
    if (nphi < 1 || nphi > 12) throw UsageError("nphi must lie in 1..12");
    positive_int_guard(per_scale, "per-scale");
    const pw::Seed k = pw::make_seed("cosine");
    auto dict = fn::bump_dictionary(0.0, 0.5);
    dict.resize(static_cast<std::size_t>(nphi));
    std::vector<double> lams;
    for (int j : js) lams.push_back(std::ldexp(1.0, -j));
    const auto x = pw::uniform_nodes(0.0, 0.5, 20000);
    std::vector<pw::WeakLimit> ws;
    for (const auto& b : dict) {
        Field y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = k.k(x[i]) * k.k(x[i]) * b(x[i]);
        ws.push_back(pw::weak_limit_measure([&](double l) { return pw::burnett_profile(l, k); }, b, 0.0, 0.5, lams,
                                            0.5 * integrate(x, y), per_scale));
    }
    io::Table t{"burnett_pairings", {"j", "lambda"}, {}};
    for (int i = 0; i < nphi; ++i) t.header.push_back("pairing_phi" + std::to_string(i));
    for (int i = 0; i < nphi; ++i) t.header.push_back("gap_phi" + std::to_string(i));
    t.header.push_back("max_gap");
    std::vector<double> maxgap(lams.size(), 0.0);
    for (std::size_t l = 0; l < lams.size(); ++l) {
        std::vector<std::string> row{fmt(js[l]), fmt(lams[l])};
        for (const auto& w : ws) row.push_back(fmt(w.pairings[l]));
        for (const auto& w : ws) {
            row.push_back(fmt(w.gaps[l]));
            maxgap[l] = std::max(maxgap[l], std::abs(w.gaps[l]));
        }
        row.push_back(fmt(maxgap[l]));
        t.add(row);
    }
    r.tables.push_back(t);
    double slope = std::numeric_limits<double>::infinity();
    for (const auto& w : ws) {
        if (!w.fit) throw UsageError("burnett: at least 4 lambdas are needed for a rate fit");
        slope = std::min(slope, w.fit->slope);
    }
    r.metric("slope", fit_rate(lams, maxgap).slope);
    r.metric("limit_phi0", ws[0].limit);
    r.at_least("min_rate_slope", slope, 0.9);
    r.at_most("final_max_gap", maxgap.back(), 1e-5);

    Grid1D g(0.0, 0.5, 2001);
    const auto xg = g.points();
    const auto h0 = pw::solve_H_averaged(k, xg);
    const Field ric = pw::ricci_uu_stencil(Field(g.n, 0.0), h0.H, g.h());
    double e = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) e = std::max(e, std::abs(ric[i] - 0.25 * k.k(xg[i]) * k.k(xg[i])));
    r.at_most("limit_ricci_vs_quarter_k2", e, 1e-6);
    return r;
}

// ---------------------------------------------------------------- 2. shell limit

Report shell_limit(const Params& p) {
    Report r;
    const auto js = ints(p, "lambda-seq");
    const pw::Seed k = pw::normalize_shell_seed(pw::make_seed(p.at("seed")));
    const fn::Bump1D phi{0.05, 0.3};
    io::Table t{"shell_limit", {"j", "lambda", "jump", "jump_gap", "pairing", "pairing_gap"}, {}};
    double jump_gap = 0.0, pair_gap = 0.0;
    std::vector<double> lams;
    for (int j : js) lams.push_back(std::ldexp(1.0, -j));
    auto w = pw::weak_limit_measure([&](double l) { return pw::shell_profile(l, k); }, phi, -0.5, 0.5, lams, phi(0.0));
    for (std::size_t i = 0; i < js.size(); ++i) {
        const double lam = lams[i];
        const auto x = pw::pulse_nodes(-0.5, 0.5, 0.0, lam, lam / 256, 1.0 / 64);
        const auto s = pw::solve_H(pw::shell_profile(lam, k).dG, x);
        const auto jmp = pw::jump_detect(s, 2 * lam);
        if (!jmp) throw NumericalError("shell-limit: no H' jump detected", lam);
        jump_gap = std::abs(jmp->magnitude + 0.25);
        pair_gap = std::abs(w.gaps[i]);
        t.add({fmt(js[i]), fmt(lam), fmt(jmp->magnitude), fmt(jump_gap), fmt(w.pairings[i]), fmt(pair_gap)});
    }
    r.tables.push_back(t);
    r.metric("lambda_final", lams.back());
    r.metric("phi_at_shell", phi(0.0));
    r.at_most("jump_gap_at_final_lambda", jump_gap, 1e-3);
    r.at_most("pairing_gap_at_final_lambda", pair_gap, 1e-3);
    return r;
}

// ---------------------------------------------------------------- 3. Gowdy

Report gowdy_check(const Params& p) {
    Report r;
    const int n = integer(p, "n");
    const int grid = integer(p, "grid");
    const double A = real(p, "A");
    const double Aa = real(p, "alpha-A");
    const auto ns = ints(p, "alpha-n");
    if (grid < 17) throw UsageError("grid must be >= 17");
    const Grid1D tau(0.0, 1.0, static_cast<std::size_t>(grid)), th(0.0, 2 * kPi / 8, static_cast<std::size_t>(grid));
    const auto v = gowdy::vacuum_residual(n, A, tau, th);
    r.metric("vacuum_residual", v.residual);
    r.metric("vacuum_residual_fine", v.residual_fine);
    r.at_least("vacuum_residual_order", v.order, 3.5);

    io::Table ta{"gowdy_alpha", {"n", "sup_alpha_gap"}, {}};
    std::vector<double> gaps;
    for (int m : ns) {
        gaps.push_back(gowdy::alpha_gap_sup(m, Aa, 0.0, 1.0));
        ta.add({fmt(m), fmt(gaps.back())});
    }
    r.tables.push_back(ta);
    r.flag("alpha_gap_monotone", monotone_decreasing(gaps));

    io::Table te{"gowdy_limit_einstein", {"tau", "G_tautau", "target_tautau", "G_thetatheta", "target_thetatheta"}, {}};
    double et = 0.0, eth = 0.0;
    for (double tt : {-0.5, 0.0, 0.7, 1.5}) {
        const auto g = gowdy::limit_einstein(A, tt);
        et = std::max(et, std::abs(g.G_tautau - A * A * std::exp(-tt) / (4 * kPi)));
        eth = std::max(eth, std::abs(g.G_thetatheta - A * A * std::exp(tt) / (4 * kPi)));
        te.add({fmt(tt), fmt(g.G_tautau), fmt(g.target_tautau), fmt(g.G_thetatheta), fmt(g.target_thetatheta)});
    }
    r.tables.push_back(te);
    r.at_most("G_tautau_error", et, 1e-5);
    r.at_most("G_thetatheta_error", eth, 1e-5);
    return r;
}

// ---------------------------------------------------------------- 4. constraints

const AngularGrid& cons_chart() {
    static const AngularGrid g(8, 8, 1.0, 1.0);
    return g;
}

cons::Coefficients cons_coefficients() {
    cons::Coefficients c;
    c.omega = [](double u, std::size_t p) { return std::exp(0.2 * u + 0.01 * static_cast<double>(p)); };
    c.dlog_omega = [](double, std::size_t) { return 0.2; };
    c.dgamma_sq = [](double u, std::size_t p) {
        const double s = 0.3 * std::sin(3 * u + 0.1 * static_cast<double>(p));
        const double ds = 0.9 * std::cos(3 * u + 0.1 * static_cast<double>(p)), sh = std::sinh(s);
        return 2 * ds * ds + 8 * sh * sh * 0.25;
    };
    return c;
}

Report constraints_check(const Params& p) {
    Report r;
    const int coarse = integer(p, "rk-intervals");
    const int nodes_n = integer(p, "nodes");
    positive_int_guard(coarse, "rk-intervals");
    if (nodes_n < 100 || nodes_n % 2) throw UsageError("nodes must be an even number >= 100");
    cons::Coefficients c8;
    c8.dgamma_sq = [](double, std::size_t) { return 8.0; };
    auto err = [&](std::size_t n) {
        const auto x = pw::uniform_nodes(0.0, 1.2, n);
        const auto s = cons::solve_vacuum_constraint(c8, x, Field(1, 1.0), Field(1, 0.0));
        double e = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) e = std::max(e, std::abs(s.Phi[i][0] - std::cos(x[i])));
        return e;
    };
    io::Table to{"constraints_rk4_order", {"intervals", "max_error"}, {}};
    std::vector<double> hs, es;
    for (int m = 0; m < 4; ++m) {
        const auto n = static_cast<std::size_t>(coarse) << m;
        es.push_back(err(n));
        hs.push_back(1.2 / static_cast<double>(n));
        to.add({fmt(static_cast<long long>(n)), fmt(es.back())});
    }
    r.tables.push_back(to);
    r.at_least("rk4_order", std::log2(es[0] / es[1]), 3.9);
    r.metric("rk4_fit_slope", fit_rate(hs, es).slope);

    const double cc = 0.6;
    cons::NullDustMeasure dust;
    dust.density = [cc](double, std::size_t) { return cc; };
    const auto xd = pw::uniform_nodes(0.0, 1.0, 400);
    const auto d = cons::solve_constraint(cons::Coefficients{}, dust, xd, Field(1, 1.0), Field(1, 0.0));
    double drift = 0.0;
    for (std::size_t i = 0; i < xd.size(); ++i)
        drift = std::max(drift, std::abs(0.5 * d.dPhi[i][0] * d.dPhi[i][0] + 0.5 * cc * std::log(d.Phi[i][0])));
    r.at_most("dust_first_integral_drift", drift, 1e-8);

    const AngularGrid& g = cons_chart();
    const auto c = cons_coefficients();
    const auto x = pw::uniform_nodes(0.0, 1.0, static_cast<std::size_t>(nodes_n));
    cons::NullDustMeasure shell;
    shell.atoms.push_back({0.5, sample(g, [](double t1, double) { return 0.3 * (1.0 + 0.5 * std::cos(2 * kPi * t1)); })});
    const auto s = cons::solve_constraint(c, shell, x, Field(g.size(), 1.0), Field(g.size(), 0.1));
    const Field ang = sample(g, [](double t1, double t2) { return 1.0 + 0.5 * std::cos(2 * kPi * t1) * std::sin(2 * kPi * t2); });
    io::Table tw{"constraints_weak_residual", {"phi", "centre", "width", "residual", "residual_without_measure"}, {}};
    double worst = 0.0, dropped = std::numeric_limits<double>::infinity();
    int i = 0;
    for (const auto& b : fn::bump_dictionary(0.0, 1.0)) {
        const cons::TestFunction phi{b, [b](double y) { return b.derivative(y); }, b.c - b.w, b.c + b.w, ang};
        const double res = cons::weak_constraint_residual(s, c, shell, phi, g);
        const double res0 = cons::weak_constraint_residual(s, c, cons::NullDustMeasure{}, phi, g);
        worst = std::max(worst, std::abs(res));
        if (b(0.5) > 0.0) dropped = std::min(dropped, std::abs(res0));
        tw.add({fmt(i++), fmt(b.c), fmt(b.w), fmt(res), fmt(res0)});
    }
    r.tables.push_back(tw);
    r.at_most("glued_shell_weak_residual", worst, 1e-6);
    r.metric("min_residual_without_measure", dropped);
    return r;
}

// ---------------------------------------------------------------- shared hf data

AngularGrid hf_chart() { return AngularGrid(8, 4, 1.0, 1.0); }

double strip_mask(double t1) {
    const double dist = std::min(t1, 1.0 - t1);
    return fn::smooth_step((dist - 1.0 / 16.0) / (1.0 / 16.0));
}

// gamma_hat = diag(e^s, e^-s), s = 0.3 sin(2 pi u)(1 + 0.3 cos(2 pi theta1)).
struct DiagMetric {
    AngularGrid g = hf_chart();
    double amp(std::size_t p) const { return 0.3 * (1.0 + 0.3 * std::cos(2 * kPi * g.theta1(p / g.n2))); }
    Sym2 gamma(double u, std::size_t p) const {
        const double s = amp(p) * std::sin(2 * kPi * u);
        return {std::exp(s), 0.0, std::exp(-s)};
    }
    Sym2 dgamma(double u, std::size_t p) const {
        const double s = amp(p) * std::sin(2 * kPi * u), ds = amp(p) * 2 * kPi * std::cos(2 * kPi * u);
        return {ds * std::exp(s), 0.0, -ds * std::exp(-s)};
    }
    Sym2 ddgamma(double u, std::size_t p) const {
        const double s = amp(p) * std::sin(2 * kPi * u), ds = amp(p) * 2 * kPi * std::cos(2 * kPi * u);
        const double dds = -amp(p) * 4 * kPi * kPi * std::sin(2 * kPi * u);
        return {(dds + ds * ds) * std::exp(s), 0.0, (-dds + ds * ds) * std::exp(-s)};
    }
};

double hf_sqrt_f(double u, std::size_t p) {
    const AngularGrid g = hf_chart();
    const double s = (u - 0.5) / 0.35, q = 1.0 - s * s;
    if (q <= 0.0) return 0.0;
    return 0.6 * std::exp(-0.5 / q) * strip_mask(g.theta1(p / g.n2));
}

double hf_dsqrt_f(double u, std::size_t p) {
    const double s = (u - 0.5) / 0.35, q = 1.0 - s * s;
    if (q <= 0.0) return 0.0;
    return hf_sqrt_f(u, p) * (-s / (q * q)) / 0.35;
}

struct SmoothDust {
    DiagMetric metric;
    cons::Coefficients c;
    std::shared_ptr<const cons::Solution> sol;
    hf::DustData data;
    Field Phi0, dPhi0;

    explicit SmoothDust(const std::vector<double>& nodes) {
        const std::size_t P = hf_chart().size();
        Phi0.assign(P, 1.0);
        dPhi0.assign(P, 0.1);
        c.omega = [](double u, std::size_t) { return std::exp(0.1 * u); };
        c.dlog_omega = [](double, std::size_t) { return 0.1; };
        const DiagMetric m = metric;
        c.dgamma_sq = [m](double u, std::size_t p) { return cons::dgamma_sq(m.gamma(u, p), m.dgamma(u, p)); };
        cons::NullDustMeasure nu;
        nu.density = [](double u, std::size_t p) { return hf_sqrt_f(u, p) * hf_sqrt_f(u, p); };
        sol = std::make_shared<const cons::Solution>(cons::solve_constraint(c, nu, nodes, Phi0, dPhi0));
        data.gamma = [m](double u, std::size_t p) { return m.gamma(u, p); };
        data.dgamma = [m](double u, std::size_t p) { return m.dgamma(u, p); };
        data.ddgamma = [m](double u, std::size_t p) { return m.ddgamma(u, p); };
        data.sqrt_f = hf_sqrt_f;
        data.dsqrt_f = hf_dsqrt_f;
        hf::SolutionTrack tr(sol);
        data.Phi = [tr](double u, std::size_t p) { return tr.value(u, p); };
        data.dPhi = [tr](double u, std::size_t p) { return tr.slope(u, p); };
    }
    cons::Coefficients omega_only() const { return {c.omega, c.dlog_omega, nullptr}; }
};

// ---------------------------------------------------------------- 5. oscillation

Report oscillation(const Params& p) {
    Report r;
    const auto ns = ints(p, "n-seq");
    for (int n : ns) positive_int_guard(n, "n");
    const std::size_t P = hf_chart().size();
    auto osc_nodes = [](double k, int n) {
        return hf::window_nodes(0.0, 1.0, 0.15, 0.85, kPi / (k * n) / 32.0, 1.0 / 256.0);
    };
    const SmoothDust coarse(hf::window_nodes(0.0, 1.0, 0.15, 0.85, 1.0 / 512, 1.0 / 256));
    const double k = hf::choose_k(coarse.data, coarse.sol->ubar, P);
    const SmoothDust dust(osc_nodes(k, *std::max_element(ns.begin(), ns.end())));
    r.metric("k", k);
    io::Table t{"oscillation", {"n", "gamma_gap", "Phi_gap", "dPhi_gap", "weak_defect", "weak_defect_without_F", "det_error"}, {}};
    std::vector<double> xs, gam, phi, wd, wd0;
    double det_err = 0.0;
    for (int n : ns) {
        const auto nodes = osc_nodes(k, n);
        auto fam = hf::build_gamma_n(dust.data, k, n);
        const auto& sol = hf::solve_phi_n(fam, dust.omega_only(), nodes, dust.Phi0, dust.dPhi0);
        double eg = 0.0, ep = 0.0, ed = 0.0, de = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            for (std::size_t q = 0; q < P; ++q) {
                const double u = nodes[i];
                const Sym2 g = dust.data.gamma(u, q), gn = fam.gamma(u, q);
                eg = std::max({eg, std::abs(gn.a - g.a), std::abs(gn.b - g.b), std::abs(gn.d - g.d)});
                ep = std::max(ep, std::abs(sol.Phi[i][q] - dust.data.Phi(u, q)));
                ed = std::max(ed, std::abs(sol.dPhi[i][q] - dust.data.dPhi(u, q)));
                de = std::max(de, std::abs(gn.det() - g.det()) / g.det());
            }
        det_err = std::max(det_err, de);
        xs.push_back(1.0 / n);
        gam.push_back(eg);
        phi.push_back(ep + ed);
        wd.push_back(hf::weak_defect_residual(fam, nodes, P));
        wd0.push_back(hf::weak_defect_residual(fam, nodes, P, false));
        t.add({fmt(n), fmt(eg), fmt(ep), fmt(ed), fmt(wd.back()), fmt(wd0.back()), fmt(de)});
    }
    r.tables.push_back(t);
    r.at_most("det_relative_error", det_err, 1e-12);
    r.at_least("gamma_slope", fit_rate(xs, gam).slope, 0.9);
    r.at_least("Phi_slope", fit_rate(xs, phi).slope, 0.9);
    r.at_least("weak_defect_slope", fit_rate(xs, wd).slope, 0.9);
    r.at_most("negative_control_slope", fit_rate(xs, wd0).slope, 0.2);
    return r;
}

// ---------------------------------------------------------------- 6. mollification

cons::NullDustMeasure interior_shell() {
    const AngularGrid g = hf_chart();
    cons::NullDustMeasure nu;
    nu.atoms.push_back({0.5, sample(g, [](double t1, double) { return 0.3 * (1.0 + 0.5 * std::cos(2 * kPi * t1)); })});
    return nu;
}

Report mollification(const Params& p) {
    Report r;
    const int mmax = integer(p, "m-max");
    if (mmax < 4) throw UsageError("m-max must be >= 4");
    const AngularGrid g = hf_chart();
    const auto nu = interior_shell();
    cons::Coefficients c;
    c.omega = [](double u, std::size_t) { return std::exp(0.2 * u); };
    c.dlog_omega = [](double, std::size_t) { return 0.2; };
    const Field ang = sample(g, [](double t1, double t2) { return 1.0 + 0.5 * std::cos(2 * kPi * t1) * std::sin(2 * kPi * t2); });

    io::Table tb{"mollification_bound", {"phi", "m", "gap", "bound"}, {}};
    double worst_ratio = 0.0;
    int idx = 0;
    for (const auto& b : fn::bump_dictionary(0.0, 1.0)) {
        if (b(0.5) == 0.0) {
            ++idx;
            continue;
        }
        const cons::TestFunction phi{b, [b](double x) { return b.derivative(x); }, b.c - b.w, b.c + b.w, ang};
        double dl2 = 0.0, linf = 0.0;
        for (int i = 0; i <= 4000; ++i) {
            const double x = b.c - b.w + 2 * b.w * i / 4000.0;
            dl2 += b.derivative(x) * b.derivative(x) * (2 * b.w / 4000.0);
            linf = std::max(linf, std::abs(b(x)));
        }
        double angL1 = 0.0;
        for (double a : ang) angL1 += std::abs(a) * g.cell_area();
        dl2 = std::sqrt(dl2) * angL1;
        linf *= angL1;
        const double exact = hf::pairing(nu, c, phi, g, 1.0);
        double C = 0.0;
        for (int m = 1; m <= mmax; ++m) {
            const double gap = std::abs(hf::pairing(hf::mollify_measure(nu, c, 1.0, m), c, phi, g) - exact);
            const double B = std::ldexp(1.0, -m) * dl2 + std::ldexp(1.0, -2 * m) * linf;
            if (m == 1) C = gap / B;
            const double bound = C * B * (1 + 1e-12) + 1e-14;
            worst_ratio = std::max(worst_ratio, gap / bound);
            tb.add({fmt(idx), fmt(m), fmt(gap), fmt(bound)});
        }
        ++idx;
    }
    r.tables.push_back(tb);
    r.at_most("pairing_gap_over_bound", worst_ratio, 1.0);

    const DiagMetric metric;
    c.dgamma_sq = [metric](double u, std::size_t q) { return cons::dgamma_sq(metric.gamma(u, q), metric.dgamma(u, q)); };
    const Field Phi0(g.size(), 1.0), dPhi0(g.size(), 0.0);
    io::Table tp{"mollification_phi", {"m", "sup", "l2_slope", "sup_slope", "min_ratio_to_jump"}, {}};
    std::vector<double> xs, err;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= mmax; ++m) {
        const auto f = hf::mollify_measure(nu, c, 1.0, m);
        const auto nodes = hf::mollifier_nodes(f, nu, 1.0 / 256);
        const auto smooth = hf::solve_phi_m_dust(f, c, nodes, Phi0, dPhi0);
        const auto glued = cons::solve_constraint(c, nu, nodes, Phi0, dPhi0);
        const auto gap = hf::phi_gap(smooth, glued, nu);
        xs.push_back(std::ldexp(1.0, -m));
        err.push_back(gap.sup + gap.l2_slope);
        min_ratio = std::min(min_ratio, gap.min_ratio);
        tp.add({fmt(m), fmt(gap.sup), fmt(gap.l2_slope), fmt(gap.sup_slope), fmt(gap.min_ratio)});
    }
    r.tables.push_back(tp);
    r.at_least("Phi_m_slope", fit_rate(xs, err).slope, 0.9);
    r.at_least("sup_derivative_over_jump", min_ratio, 0.5 * (1 - 1e-12));
    return r;
}

// ---------------------------------------------------------------- 7. full pipeline

hf::Background flat_background() {
    hf::Background bg;
    bg.chart = hf_chart();
    bg.gamma = [](double, std::size_t) { return Sym2{1.0, 0.0, 1.0}; };
    bg.ustar = 1.0;
    bg.Phi0.assign(bg.chart.size(), 1.0);
    bg.dPhi0.assign(bg.chart.size(), 0.0);
    return bg;
}

cons::NullDustMeasure masked_shell(double scale) {
    const AngularGrid g = hf_chart();
    cons::NullDustMeasure nu;
    nu.atoms.push_back({0.5, sample(g, [scale](double t1, double) {
                            return scale * (1.0 + 0.5 * std::cos(2 * kPi * t1)) * strip_mask(t1);
                        })});
    return nu;
}

std::vector<cons::TestFunction> near_atom_tests() {
    const AngularGrid g = hf_chart();
    std::vector<cons::TestFunction> out;
    auto phi = [](double u) { return fn::plateau((u - 0.5) / 0.1); };
    auto dphi = [](double u) {
        const double t = (u - 0.5) / 0.1, a = std::abs(t);
        if (a <= 1.0 || a >= 2.0) return 0.0;
        return -fn::smooth_step_derivative(a - 1.0) * (t > 0 ? 1.0 : -1.0) / 0.1;
    };
    out.push_back({phi, dphi, 0.3, 0.7, {}});
    out.push_back({phi, dphi, 0.3, 0.7, sample(g, [](double t1, double t2) {
                       return 1.0 + 0.5 * std::cos(2 * kPi * t1) + 0.3 * std::cos(2 * kPi * t2);
                   })});
    return out;
}

Report pipeline(const Params& p) {
    Report r;
    const int mmax = integer(p, "m-max");
    const int mlin = integer(p, "linearity-m");
    if (mmax < 4) throw UsageError("m-max must be >= 4");
    positive_int_guard(mlin, "linearity-m");
    const auto bg = flat_background();
    const auto nu = masked_shell(1.0);
    const auto phis = near_atom_tests();
    std::vector<hf::WeakRow> rows;
    for (int m = 1; m <= mmax; ++m) {
        const auto st = hf::approx_pipeline(nu, bg, m);
        const auto rr = hf::stage_pairings(st, nu, bg, phis);
        rows.insert(rows.end(), rr.begin(), rr.end());
    }
    io::Table t{"pipeline_pairings", {"m", "phi", "lhs", "pairing", "gap"}, {}};
    for (const auto& w : rows) t.add({fmt(w.m), fmt(static_cast<long long>(w.phi)), fmt(w.lhs), fmt(w.pairing), fmt(w.gap)});
    r.tables.push_back(t);
    const auto wc = hf::fit_weak_rows(rows, phis.size());
    double slope = std::numeric_limits<double>::infinity();
    for (const auto& f : wc.fits) {
        if (!f) throw NumericalError("pipeline: rate fit unavailable");
        slope = std::min(slope, f->slope);
    }
    r.at_least("min_rate_slope", slope, 0.9);

    const auto nu2 = masked_shell(2.0);
    const auto r1 = hf::stage_pairings(hf::approx_pipeline(nu, bg, mlin), nu, bg, phis);
    const auto r2 = hf::stage_pairings(hf::approx_pipeline(nu2, bg, mlin), nu2, bg, phis);
    double lin = 0.0;
    for (std::size_t j = 0; j < phis.size(); ++j) lin = std::max(lin, std::abs(r2[j].lhs / r1[j].lhs / 2.0 - 1.0));
    r.at_most("linearity_relative_error", lin, 0.01);
    return r;
}

// ---------------------------------------------------------------- 8. trapped

std::function<double(double, double)> parse_mass(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw UsageError("mass must be const:<m> or cos:<c0>,<c1>");
    const std::string kind = s.substr(0, colon), args = s.substr(colon + 1);
    if (kind == "const") {
        const double m = parse_real(args);
        return [m](double, double) { return m; };
    }
    if (kind == "cos") {
        const auto comma = args.find(',');
        if (comma == std::string::npos) throw UsageError("cos mass needs two coefficients");
        const double c0 = parse_real(args.substr(0, comma)), c1 = parse_real(args.substr(comma + 1));
        return [c0, c1](double t1, double) { return c0 + c1 * std::cos(2 * kPi * t1); };
    }
    throw UsageError("unknown mass profile '" + kind + "'");
}

Report trapped(const Params& p) {
    Report r;
    const AngularGrid chart(8, 4, 1.0, 1.0);
    const double ustar = real(p, "ustar");
    const auto user = shell::make_shell(chart, parse_mass(p.at("mass")), ustar);
    const auto verdict = shell::is_trapped(user);
    r.metric("trapped", verdict.overall ? 1.0 : 0.0);
    r.metric("margin", verdict.margin);
    r.metric("trapped_fraction", verdict.fraction);
    r.note("verdict", verdict.overall ? "trapped" : "not trapped");

    const int samples = integer(p, "samples");
    positive_int_guard(samples, "samples");
    std::mt19937_64 rng(static_cast<std::uint64_t>(parse_int(p.at("seed"))));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int disagree = 0;
    io::Table ts{"trapped_samples", {"sample", "ustar", "inf_m", "threshold", "trapped", "analytic"}, {}};
    for (int s = 0; s < samples; ++s) {
        const double us = 0.02 + 0.96 * U(rng);
        const double c0 = 2.5 * U(rng), c1 = 0.5 * U(rng), c2 = 0.5 * U(rng);
        const auto sh = shell::make_shell(
            chart, [=](double t1, double t2) {
                return std::max(0.0, c0 + c1 * std::cos(2 * kPi * t1) + c2 * std::sin(2 * kPi * t2));
            },
            us);
        const double inf = *std::min_element(sh.m.begin(), sh.m.end());
        const bool a = inf > 2 * (1 - us), b = shell::is_trapped(sh).overall;
        disagree += a != b ? 1 : 0;
        ts.add({fmt(s), fmt(us), fmt(inf), fmt(2 * (1 - us)), fmt(b), fmt(a)});
    }
    r.tables.push_back(ts);
    r.at_most("disagreements", disagree, 0);

    bool marginal_ok = true;
    for (double us : {0.2, 0.5, 0.8}) {
        const double thr = 2 * (1 - us);
        marginal_ok = marginal_ok && !shell::is_trapped(shell::make_shell(chart, [thr](double, double) { return thr; }, us)).overall;
    }
    r.flag("marginal_not_trapped", marginal_ok);

    auto ang = [chart](std::size_t q) {
        return 1.0 + 0.4 * std::cos(2 * kPi * chart.theta1(q / chart.n2)) * std::sin(2 * kPi * chart.theta2(q % chart.n2));
    };
    shell::ShellTestFn f;
    f.phi = [ang](double u, double ub, std::size_t q) { return ang(q) * std::cos(ub + 0.5 * u) * std::exp(ub / 3); };
    f.d_ubar = [ang](double u, double ub, std::size_t q) {
        return ang(q) * std::exp(ub / 3) * (-std::sin(ub + 0.5 * u) + std::cos(ub + 0.5 * u) / 3);
    };
    f.d_u = [ang](double u, double ub, std::size_t q) { return -0.5 * ang(q) * std::sin(ub + 0.5 * u) * std::exp(ub / 3); };
    const auto s = shell::make_shell(
        chart, [](double t1, double t2) { return 0.8 + 0.3 * std::cos(2 * kPi * t1) + 0.1 * std::sin(2 * kPi * t2); }, 0.5);
    io::Table tw{"trapped_weak_residuals", {"u", "trch_residual", "without_measure", "pairing"}, {}};
    double worst = 0.0, control = std::numeric_limits<double>::infinity();
    for (double u : {0.0, 0.3, 0.5}) {
        const double res = shell::weak_trch_residual(s, f, u, -0.4, 0.2);
        const double drop = shell::weak_trch_residual(s, f, u, -0.4, 0.2, false);
        const double pair = shell::measure_pairing(s, f, u);
        worst = std::max(worst, std::abs(res));
        control = std::min(control, std::abs(drop) / std::abs(pair));
        tw.add({fmt(u), fmt(res), fmt(drop), fmt(pair)});
    }
    const double nu_res = shell::dust_propagation_residual(s, f, 0.0, 0.9, 0.5);
    r.tables.push_back(tw);
    r.at_most("weak_trch_residual", worst, 1e-6);
    r.at_most("weak_nu_residual", std::abs(nu_res), 1e-6);
    r.at_least("negative_control_over_pairing", control, 0.5);
    return r;
}

// ---------------------------------------------------------------- 9. compensated compactness

double cc_psi(double u, double ub) { return std::exp(0.3 * std::sin(u + ub)) * (1.0 + 0.2 * std::cos(2.0 * u)); }

Report compensated(const Params& p) {
    Report r;
    const int dim = integer(p, "dim");
    const double C1 = real(p, "c1");
    const int trials = integer(p, "trials");
    const int grid = integer(p, "grid");
    const auto ns = ints(p, "n-seq");
    const std::string which = p.at("pair");
    if (dim != 2 && dim != 4) throw UsageError("dim must be 2 or 4");
    positive_int_guard(trials, "trials");
    if (!(C1 > 1.0)) throw UsageError("c1 must exceed 1");
    const cc::Box box = dim == 2 ? cc::box2(128) : cc::box4(16);
    const double c_hi = std::min(C1, 0.125 * box.dims[0]);
    std::mt19937_64 rng(static_cast<std::uint64_t>(parse_int(p.at("seed"))));
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_real_distribution<double> U(1.0 + 0.05 * (c_hi - 1.0), c_hi);
    auto noise = [&] {
        Field f(box.size());
        for (double& v : f) v = N(rng);
        return f;
    };
    io::Table ts{"cc_support", {"trial", "C1", "ok", "margin", "low_relative", "reconstruction_f", "reconstruction_h"}, {}};
    int violations = 0;
    double recon = 0.0;
    for (int t = 0; t < trials; ++t) {
        const double c = t == 0 ? c_hi : U(rng);
        const Field f = noise(), h = noise();
        const auto df = cc::decompose(f, box, c, cc::Role::F);
        const auto dh = cc::decompose(h, box, c, cc::Role::H);
        const double ef = df.reconstruction_error(f), eh = dh.reconstruction_error(h);
        recon = std::max({recon, ef, eh});
        const auto s = cc::support_check(df, dh);
        violations += s.ok ? 0 : 1;
        ts.add({fmt(t), fmt(c), fmt(s.ok), fmt(s.margin), fmt(s.low_relative), fmt(ef), fmt(eh)});
    }
    r.tables.push_back(ts);
    r.metric("dim", dim);
    r.at_most("partition_reconstruction_error", recon, 1e-12);
    r.at_most("support_violations", violations, 0);

    io::Table tp{"cc_pairings", {"pair", "n", "pairing", "gap", "f_bound", "h_bound"}, {}};
    for (const auto& name : cc::pair_names()) {
        if (which != "all" && which != name) continue;
        const auto w = cc::weak_product_test(cc::named_pair(name), cc_psi, ns, grid);
        for (const auto& row : w.rows)
            tp.add({name, fmt(row.n), fmt(row.pairing), fmt(row.gap), fmt(row.f_bound), fmt(row.h_bound)});
        r.metric(name + "_limit", w.limit);
        r.metric(name + "_extrapolated", w.extrapolated);
        r.note(name + "_verdict", w.verdict ? "converges to f_inf h_inf" : "does not converge to f_inf h_inf");
        if (name == "transverse") {
            r.flag("transverse_hypotheses", w.transverse && w.bounds_ok);
            r.at_most("transverse_final_gap", std::abs(w.rows.back().gap), 1e-3);
        } else if (name == "sin2") {
            double dev = 0.0;
            for (const auto& row : w.rows) dev = std::max(dev, std::abs(row.pairing / w.psi_mean - 0.5));
            r.at_most("sin2_ratio_minus_half", dev, 1e-6);
            r.flag("sin2_fails_transversality", !w.transverse && !w.verdict);
        } else {
            r.flag("strong_weak_verdict", w.verdict);
        }
    }
    r.tables.push_back(tp);
    return r;
}

// ---------------------------------------------------------------- 10. characteristic pipeline

Sym2 flat(double, std::size_t) { return {1.0, 0.0, 1.0}; }

struct Wavy {
    AngularGrid g;
    explicit Wavy(std::size_t na) : g(na, na, 1.0, 1.0) {}
    double t1(std::size_t p) const { return g.theta1(p / g.n2); }
    double t2(std::size_t p) const { return g.theta2(p % g.n2); }
    std::pair<double, double> omega(double u, std::size_t p) const {
        const double c = 0.1 * (1.0 + 0.5 * std::sin(2 * kPi * t1(p)));
        return {std::exp(c * u), c};
    }
    std::pair<double, double> phi(double u, std::size_t p) const {
        const double c = 0.05 * std::cos(2 * kPi * t1(p)) + 0.03 * std::sin(2 * kPi * t2(p));
        return {1.0 + 0.3 * u + c * u * u, 0.3 + 2 * c * u};
    }
    Sym2 gamma(double u, std::size_t p) const {
        const double s = 0.2 * std::sin(kPi * u) * std::cos(2 * kPi * t2(p));
        const double c = 0.1 * u * std::sin(2 * kPi * t1(p));
        return {std::exp(s), c, std::exp(-s) * (1.0 + c * c)};
    }
    Sym2 dgamma(double u, std::size_t p) const {
        const double s = 0.2 * std::sin(kPi * u) * std::cos(2 * kPi * t2(p));
        const double ds = 0.2 * kPi * std::cos(kPi * u) * std::cos(2 * kPi * t2(p));
        const double c = 0.1 * u * std::sin(2 * kPi * t1(p)), dc = 0.1 * std::sin(2 * kPi * t1(p));
        return {ds * std::exp(s), dc, -ds * std::exp(-s) * (1.0 + c * c) + std::exp(-s) * 2 * c * dc};
    }
    cp::ReducedCharData data(std::size_t n) const {
        const Wavy w = *this;
        auto d = cp::sample_data(
            g, n, 1.0, [w](double u, std::size_t p) { return w.omega(u, p); },
            [w](double u, std::size_t p) { return w.phi(u, p); },
            [w](double u, std::size_t p) { return w.gamma(u, p); },
            [w](double u, std::size_t p) { return w.dgamma(u, p); });
        d.K_ref = 1.0;
        return d;
    }
    cp::CornerData corner() const {
        const std::size_t P = g.size();
        cp::CornerData c;
        c.dub1.resize(P);
        c.dub2.resize(P);
        c.omegab.resize(P);
        c.trchib.resize(P);
        c.chibhat = SymField{Field(P), Field(P), Field(P)};
        for (std::size_t p = 0; p < P; ++p) {
            c.dub1[p] = 0.05 * std::sin(2 * kPi * t2(p));
            c.dub2[p] = 0.04 * std::cos(2 * kPi * t1(p));
            c.omegab[p] = 0.1 * std::cos(2 * kPi * t1(p));
            c.trchib[p] = -2.0 + 0.1 * std::sin(2 * kPi * (t1(p) + t2(p)));
            c.chibhat.a[p] = 0.05 * std::cos(2 * kPi * t2(p));
            c.chibhat.b[p] = 0.03 * std::sin(2 * kPi * t1(p));
            c.chibhat.d[p] = -0.05 * std::cos(2 * kPi * t2(p));
        }
        return c;
    }
};

Report characteristic(const Params& p) {
    Report r;
    const int slices = integer(p, "slices");
    const int na = integer(p, "chart");
    if (slices < 5 || slices % 2 == 0) throw UsageError("slices must be odd and >= 5");
    if (na < 4) throw UsageError("chart must be >= 4");
    const AngularGrid g(static_cast<std::size_t>(na), static_cast<std::size_t>(na), 1.0, 1.0);
    auto d = cp::sample_data(
        g, static_cast<std::size_t>(slices), 1.0, [](double, std::size_t) { return std::make_pair(1.0, 0.0); },
        [](double u, std::size_t) { return std::make_pair(u + 1.0, 1.0); }, flat);
    d.dlog_omega.clear();
    d.K_ref = 1.0;
    const auto o = cp::derive_outgoing(d);
    const auto rc = cp::solve_transport_system(d, o, cp::minkowski_corner(g));
    io::Table tm{"characteristic_minkowski", {"ubar", "trchi_error", "trchib_error"}, {}};
    double tr = 0.0, trb = 0.0;
    for (std::size_t j = 0; j < rc.slice.size(); ++j) {
        const double rr = rc.ubar[j] + 1.0;
        double a = 0.0, b = 0.0;
        for (std::size_t q = 0; q < g.size(); ++q) {
            a = std::max(a, std::abs(rc.trchi[j][q] - 2.0 / rr));
            b = std::max(b, std::abs(rc.trchib[j][q] + 2.0 / rr));
        }
        tr = std::max(tr, a);
        trb = std::max(trb, b);
        tm.add({fmt(rc.ubar[j]), fmt(a), fmt(b)});
    }
    r.tables.push_back(tm);
    r.at_most("minkowski_trchi_error", tr, 1e-8);
    r.at_most("minkowski_trchib_error", trb, 1e-8);

    const Wavy coarse(16), fine(32);
    const auto dc = coarse.data(33), df = fine.data(65);
    const auto oc = cp::derive_outgoing(dc), of = cp::derive_outgoing(df);
    const auto rcc = cp::solve_transport_system(dc, oc, coarse.corner());
    const auto rcf = cp::solve_transport_system(df, of, fine.corner());
    const auto ec = cp::structure_residuals(rcc, dc, oc), ef = cp::structure_residuals(rcf, df, of);
    io::Table to{"characteristic_residual_orders", {"residual", "coarse", "fine", "order"}, {}};
    double order = std::numeric_limits<double>::infinity();
    for (const auto& [name, q] : cp::residual_orders(ec, ef)) {
        to.add({name, fmt(ec.value(name)), fmt(ef.value(name)), fmt(q)});
        if (name == "Ric4A" || name == "metric_b" || name == "Ric34" || name == "trRicAB" || name == "RicAB")
            order = std::min(order, q);
    }
    r.tables.push_back(to);
    r.at_least("min_residual_order", order, 3.0);
    r.at_most("relation_error_transport", std::max(rc.relation_error, rcf.relation_error), 1e-12);
    r.at_most("relation_error_reconstruction", ef.value("relation"), 1e-12);
    return r;
}

std::vector<Experiment> make_experiments() {
    using K = Kind;
    std::vector<Experiment> v;
    v.push_back({"burnett", 1, "Burnett limit",
                 {{"lambda-seq", "2..10", K::IntList, "exponents j, lambda = 2^-j", {}},
                  {"nphi", "5", K::Int, "dictionary test functions", {}},
                  {"per-scale", "512", K::Int, "quadrature points per lambda", {}}},
                 burnett});
    v.push_back({"shell-limit", 2, "Shell limit",
                 {{"lambda-seq", "4..10", K::IntList, "exponents j, lambda = 2^-j", {}},
                  {"seed", "bump", K::Text, "shell seed profile", {"bump", "poly"}}},
                 shell_limit});
    v.push_back({"gowdy", 3, "Gowdy",
                 {{"n", "8", K::Int, "mode number for the vacuum residual", {}},
                  {"grid", "65", K::Int, "samples per axis", {}},
                  {"A", "1.0", K::Real, "amplitude", {}},
                  {"alpha-A", "1.3", K::Real, "amplitude for the alpha sequence", {}},
                  {"alpha-n", "100,316,1000,3162,10000,31623,100000", K::IntList, "mode numbers for alpha", {}}},
                 gowdy_check});
    v.push_back({"constraints", 4, "Constraint solver",
                 {{"rk-intervals", "25", K::Int, "coarsest RK4 interval count", {}},
                  {"nodes", "2000", K::Int, "intervals for the glued shell solve", {}}},
                 constraints_check});
    v.push_back({"oscillation", 5, "Oscillation absorber",
                 {{"n-seq", "8,16,32,64,128", K::IntList, "oscillation numbers", {}}}, oscillation});
    v.push_back({"mollification", 6, "Mollification", {{"m-max", "10", K::Int, "largest mollification level", {}}},
                 mollification});
    v.push_back({"pipeline", 7, "Full pipeline",
                 {{"m-max", "8", K::Int, "largest mollification level", {}},
                  {"linearity-m", "5", K::Int, "level used for the mass linearity check", {}}},
                 pipeline});
    v.push_back({"trapped", 8, "Trapped surfaces",
                 {{"ustar", "0.5", K::Real, "shell crossing u*", {}},
                  {"mass", "const:1.2", K::Text, "const:<m> or cos:<c0>,<c1>", {}},
                  {"samples", "1000", K::Int, "randomized criterion samples", {}},
                  {"seed", "2024", K::Int, "random seed", {}}},
                 trapped});
    v.push_back({"cc-demo", 9, "Compensated compactness",
                 {{"dim", "2", K::Int, "box dimension, 2 or 4", {}},
                  {"c1", "2.0", K::Real, "frequency threshold C1 > 1", {}},
                  {"n-seq", "16,32,64,128,256", K::IntList, "oscillation numbers", {}},
                  {"pair", "all", K::Text, "sequence pair", {"all", "transverse", "sin2", "strong-weak"}},
                  {"grid", "1024", K::Int, "samples per axis for pairings", {}},
                  {"trials", "100", K::Int, "randomized support trials", {}},
                  {"seed", "99", K::Int, "random seed", {}}},
                 compensated});
    v.push_back({"characteristic", 10, "Characteristic pipeline",
                 {{"slices", "129", K::Int, "Minkowski slices (odd)", {}}, {"chart", "8", K::Int, "angular points per axis", {}}},
                 characteristic});
    return v;
}

}  // namespace

const std::vector<Experiment>& experiments() {
    static const std::vector<Experiment> v = make_experiments();
    return v;
}

const Experiment& experiment(const std::string& name) {
    for (const auto& e : experiments())
        if (e.name == name) return e;
    throw UsageError("unknown experiment '" + name + "'");
}

Params resolve(const Experiment& e, const Params& overrides) {
    Params out;
    for (const auto& s : e.params) out[s.name] = s.value;
    for (const auto& [k, v] : overrides) {
        auto it = std::find_if(e.params.begin(), e.params.end(), [&](const ParamSpec& s) { return s.name == k; });
        if (it == e.params.end()) throw UsageError(e.name + ": unknown parameter '" + k + "'");
        out[k] = v;
    }
    for (const auto& s : e.params) {
        const std::string& v = out[s.name];
        try {
            switch (s.kind) {
                case Kind::Real: parse_real(v); break;
                case Kind::Int: parse_int(v); break;
                case Kind::IntList: parse_int_list(v); break;
                case Kind::Text:
                    if (!s.choices.empty() && std::find(s.choices.begin(), s.choices.end(), v) == s.choices.end())
                        throw UsageError("'" + v + "' is not one of the allowed values");
                    break;
            }
        } catch (const UsageError& err) {
            throw UsageError(e.name + ": --" + s.name + ": " + err.what());
        }
    }
    return out;
}

Report run_experiment(const Experiment& e, const Params& overrides) {
    const Params p = resolve(e, overrides);
    const auto t0 = std::chrono::steady_clock::now();
    Report r;
    try {
        r = e.run(p);
    } catch (const NumericalError& err) {
        r = Report{};
        std::ostringstream os;
        os << err.what();
        if (err.index() >= 0) os << " [index " << err.index() << ", location " << err.location() << "]";
        r.error = os.str();
    }
    r.criterion = e.criterion;
    r.name = e.title;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<Report> verify_all(int jobs) {
    const auto& ex = experiments();
    std::vector<Report> out(ex.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < ex.size(); i = next++) {
            try {
                out[i] = run_experiment(ex[i]);
            } catch (const std::exception& err) {
                out[i].criterion = ex[i].criterion;
                out[i].name = ex[i].title;
                out[i].error = err.what();
            }
        }
    };
    const int n = std::clamp(jobs, 1, static_cast<int>(ex.size()));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace hfl::acc
