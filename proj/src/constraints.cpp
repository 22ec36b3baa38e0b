#include "hfl/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hfl/error.hpp"
#include "hfl/kernels.hpp"

namespace hfl::cons {

namespace {

double eval_or(const PointFn& f, double x, std::size_t p, double fallback) { return f ? f(x, p) : fallback; }

struct Stage {
    const Coefficients& c;
    const NullDustMeasure& nu;
    const std::vector<std::size_t>& pts;
    Field dlo, q, f;

    // dy = F(x, y) for y = [Phi(0..K-1), Phi'(0..K-1)].
    void operator()(double x, const double* y, double* dy) {
        const std::size_t K = pts.size();
        for (std::size_t k = 0; k < K; ++k) {
            const std::size_t p = pts[k];
            const double Phi = y[k], dPhi = y[K + k];
            if (!(Phi > 0.0)) {
                std::ostringstream os;
                os << "constraint solve: Phi reaches zero near ubar = " << x << " at angular index " << p;
                throw NumericalError(os.str(), x, static_cast<long>(p));
            }
            double v = -0.125 * eval_or(c.dgamma_sq, x, p, 0.0) * Phi + 2.0 * eval_or(c.dlog_omega, x, p, 0.0) * dPhi;
            if (nu.density) v -= 0.5 * nu.density(x, p) / Phi;
            dy[k] = dPhi;
            dy[K + k] = v;
        }
    }
};

}  // namespace

void validate(const NullDustMeasure& nu, double a, double b) {
    for (const Atom& at : nu.atoms) {
        if (!(at.ubar > a && at.ubar < b)) throw UsageError("null dust atom must lie strictly inside the interval");
        for (double m : at.mass)
            if (m < 0.0) throw UsageError("null dust atom masses must be non-negative");
    }
}

Solution solve_constraint(const Coefficients& c, const NullDustMeasure& nu, const std::vector<double>& nodes,
                          const Field& Phi0, const Field& dPhi0, std::vector<std::size_t> points) {
    if (nodes.size() < 2) throw UsageError("constraint solve: need at least two nodes");
    if (Phi0.size() != dPhi0.size()) throw UsageError("constraint solve: initial data size mismatch");
    validate(nu, nodes.front(), nodes.back());
    if (points.empty()) {
        points.resize(Phi0.size());
        std::iota(points.begin(), points.end(), std::size_t{0});
    }
    const std::size_t K = points.size();
    std::vector<std::size_t> atom_node(nu.atoms.size());
    for (std::size_t a = 0; a < nu.atoms.size(); ++a) {
        auto it = std::find_if(nodes.begin(), nodes.end(),
                               [&](double x) { return std::abs(x - nu.atoms[a].ubar) <= 1e-12 * (1 + std::abs(x)); });
        if (it == nodes.end()) throw UsageError("constraint solve: atom location must be a node");
        atom_node[a] = static_cast<std::size_t>(it - nodes.begin());
    }

    const auto& kt = kern::active();
    Stage F{c, nu, points, {}, {}, {}};
    std::vector<double> y(2 * K), k1(2 * K), k2(2 * K), k3(2 * K), k4(2 * K), tmp(2 * K);
    for (std::size_t k = 0; k < K; ++k) {
        y[k] = Phi0[points[k]];
        y[K + k] = dPhi0[points[k]];
    }

    Solution s;
    s.points = points;
    auto record = [&](double x) {
        F(x, y.data(), k1.data());
        s.ubar.push_back(x);
        s.Phi.emplace_back(y.begin(), y.begin() + K);
        s.dPhi.emplace_back(y.begin() + K, y.end());
        s.ddPhi.emplace_back(k1.begin() + K, k1.end());
    };
    auto apply_atoms = [&](std::size_t i) {
        bool any = false;
        for (std::size_t a = 0; a < nu.atoms.size(); ++a) {
            if (atom_node[a] != i) continue;
            any = true;
            const double x = nodes[i];
            for (std::size_t k = 0; k < K; ++k) {
                const std::size_t p = points[k];
                double O = eval_or(c.omega, x, p, 1.0);
                y[K + k] -= 0.5 * O * O * nu.atoms[a].mass[p] / y[k];
            }
        }
        return any;
    };

    record(nodes[0]);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double x = nodes[i - 1], h = nodes[i] - nodes[i - 1];
        F(x, y.data(), k1.data());
        kt.lincomb(tmp.data(), y.data(), 0.5 * h, k1.data(), 2 * K);
        F(x + 0.5 * h, tmp.data(), k2.data());
        kt.lincomb(tmp.data(), y.data(), 0.5 * h, k2.data(), 2 * K);
        F(x + 0.5 * h, tmp.data(), k3.data());
        kt.lincomb(tmp.data(), y.data(), h, k3.data(), 2 * K);
        F(x + h, tmp.data(), k4.data());
        kt.rk4_update(y.data(), h / 6.0, k1.data(), k2.data(), k3.data(), k4.data(), 2 * K);
        record(nodes[i]);
        if (apply_atoms(i)) record(nodes[i]);
    }
    return s;
}

Solution solve_vacuum_constraint(const Coefficients& c, const std::vector<double>& nodes, const Field& Phi0,
                                 const Field& dPhi0, std::vector<std::size_t> points) {
    return solve_constraint(c, NullDustMeasure{}, nodes, Phi0, dPhi0, std::move(points));
}

double weak_constraint_residual(const Solution& s, const Coefficients& c, const NullDustMeasure& nu,
                                const TestFunction& phi, const AngularGrid& chart, std::span<const double> area) {
    if (!(phi.lo > s.ubar.front() && phi.hi < s.ubar.back()))
        throw UsageError("weak_constraint_residual: test function support must lie inside the open interval");
    const std::size_t N = s.ubar.size(), K = s.points.size();
    std::vector<double> integrand(N);
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        const std::size_t p = s.points[k];
        const double ang = phi.angular.empty() ? 1.0 : phi.angular[p];
        if (ang == 0.0) continue;
        for (std::size_t i = 0; i < N; ++i) {
            const double x = s.ubar[i];
            const double O = eval_or(c.omega, x, p, 1.0);
            const double Oi2 = 1.0 / (O * O);
            const double Phi = s.Phi[i][k];
            double v = -phi.dphi(x) * Oi2 * s.dPhi[i][k] + 0.125 * phi.phi(x) * Oi2 * eval_or(c.dgamma_sq, x, p, 0.0) * Phi;
            if (nu.density) v += 0.5 * phi.phi(x) * Oi2 * nu.density(x, p) / Phi;
            integrand[i] = v;
        }
        double I = integrate(s.ubar, integrand);
        for (const Atom& at : nu.atoms) {
            auto it = std::lower_bound(s.ubar.begin(), s.ubar.end(), at.ubar - 1e-12);
            const double Phi = s.Phi[static_cast<std::size_t>(it - s.ubar.begin())][k];
            I += 0.5 * phi.phi(at.ubar) * at.mass[p] / Phi;
        }
        const double w = area.empty() ? chart.cell_area() : area[p];
        total += ang * I * w;
    }
    return total;
}

double dgamma_sq(const Sym2& g, const Sym2& dg) {
    Sym2 i = g.inverse();
    // M = g^-1 dg; result tr(M M)
    double m11 = i.a * dg.a + i.b * dg.b, m12 = i.a * dg.b + i.b * dg.d;
    double m21 = i.b * dg.a + i.d * dg.b, m22 = i.b * dg.b + i.d * dg.d;
    return m11 * m11 + 2.0 * m12 * m21 + m22 * m22;
}

namespace {
// d/d ubar of a per-slice field family on uniform samples.
std::vector<Field> slice_derivative(const std::vector<const Field*>& f, double h) {
    const std::size_t N = f.size(), P = f.front()->size();
    std::vector<Field> out(N, Field(P));
    Field line(N), d;
    for (std::size_t p = 0; p < P; ++p) {
        for (std::size_t i = 0; i < N; ++i) line[i] = (*f[i])[p];
        d = fd4_derivative(line, h);
        for (std::size_t i = 0; i < N; ++i) out[i][p] = d[i];
    }
    return out;
}
}  // namespace

std::vector<Field> dgamma_norm_sq(const std::vector<SymField>& gh, double h) {
    const std::size_t N = gh.size();
    std::vector<const Field*> a(N), b(N), d(N);
    for (std::size_t i = 0; i < N; ++i) {
        a[i] = &gh[i].a;
        b[i] = &gh[i].b;
        d[i] = &gh[i].d;
    }
    auto da = slice_derivative(a, h), db = slice_derivative(b, h), dd = slice_derivative(d, h);
    std::vector<Field> out(N, Field(gh.front().a.size()));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t p = 0; p < out[i].size(); ++p) {
            Sym2 g{gh[i].a[p], gh[i].b[p], gh[i].d[p]};
            if (!(g.det() > 0.0 && g.a > 0.0))
                throw NumericalError("dgamma_norm_sq: gamma_hat not positive definite", static_cast<double>(i),
                                     static_cast<long>(p));
            out[i][p] = dgamma_sq(g, {da[i][p], db[i][p], dd[i][p]});
        }
    return out;
}

double chihat_sq(const Sym2& g, const Sym2& c) { return dgamma_sq(g, c); }

ChiData chi_from_data(double h, const std::vector<Field>& Omega, const std::vector<Field>& Phi,
                      const std::vector<Field>& dPhi, const std::vector<SymField>& gh) {
    const std::size_t N = gh.size(), P = gh.front().a.size();
    std::vector<Field> ga(N, Field(P)), gb(N, Field(P)), gd(N, Field(P));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t p = 0; p < P; ++p) {
            double s = Phi[i][p] * Phi[i][p];
            ga[i][p] = s * gh[i].a[p];
            gb[i][p] = s * gh[i].b[p];
            gd[i][p] = s * gh[i].d[p];
        }
    std::vector<const Field*> pa(N), pb(N), pd(N);
    for (std::size_t i = 0; i < N; ++i) {
        pa[i] = &ga[i];
        pb[i] = &gb[i];
        pd[i] = &gd[i];
    }
    auto da = slice_derivative(pa, h), db = slice_derivative(pb, h), dd = slice_derivative(pd, h);
    ChiData out;
    out.trchi.assign(N, Field(P));
    out.chihat.assign(N, SymField{Field(P), Field(P), Field(P)});
    out.chihat_sq.assign(N, Field(P));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t p = 0; p < P; ++p) {
            const double c = 0.5 / Omega[i][p];
            Sym2 chi{c * da[i][p], c * db[i][p], c * dd[i][p]};
            Sym2 g{ga[i][p], gb[i][p], gd[i][p]};
            Sym2 gi = g.inverse();
            double tr = gi.a * chi.a + 2.0 * gi.b * chi.b + gi.d * chi.d;
            Sym2 hat{chi.a - 0.5 * tr * g.a, chi.b - 0.5 * tr * g.b, chi.d - 0.5 * tr * g.d};
            out.trchi[i][p] = tr;
            out.chihat[i].a[p] = hat.a;
            out.chihat[i].b[p] = hat.b;
            out.chihat[i].d[p] = hat.d;
            out.chihat_sq[i][p] = chihat_sq(g, hat);
            double ident = 2.0 * dPhi[i][p] / (Omega[i][p] * Phi[i][p]);
            out.identity_error = std::max(out.identity_error, std::abs(tr - ident));
        }
    return out;
}

MassFunctional christodoulou_mass(const std::vector<double>& ubar, const std::vector<Field>& sq, double delta) {
    auto it = std::find_if(ubar.begin(), ubar.end(), [&](double x) { return std::abs(x - delta) <= 1e-12 * (1 + std::abs(x)); });
    if (it == ubar.end()) throw UsageError("christodoulou_mass: delta must be a node");
    std::size_t end = static_cast<std::size_t>(it - ubar.begin()) + 1;
    while (end < ubar.size() && ubar[end] == ubar[end - 1]) ++end;
    std::vector<double> x(ubar.begin(), ubar.begin() + end), y(end);
    MassFunctional m;
    const std::size_t P = sq.front().size();
    m.per_point.resize(P);
    for (std::size_t p = 0; p < P; ++p) {
        for (std::size_t i = 0; i < end; ++i) y[i] = sq[i][p];
        m.per_point[p] = end > 1 ? integrate(x, y) : 0.0;
    }
    m.infimum = *std::min_element(m.per_point.begin(), m.per_point.end());
    return m;
}

}  // namespace hfl::cons
