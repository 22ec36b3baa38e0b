#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hfl/constraints.hpp"
#include "hfl/error.hpp"
#include "hfl/functions.hpp"
#include "hfl/plane_wave.hpp"

using namespace hfl;
using namespace hfl::cons;
using std::numbers::pi;

namespace {

const AngularGrid chart(8, 8, 1.0, 1.0);

Field angular_factor() {
    return sample(chart, [](double t1, double t2) { return 1.0 + 0.5 * std::cos(2 * pi * t1) * std::sin(2 * pi * t2); });
}

// Unit-determinant gamma_hat = R(psi)^T diag(e^s, e^-s) R(psi).
Sym2 gamma_hat(double s, double psi) {
    double c = std::cos(psi), n = std::sin(psi), E = std::exp(s), e = std::exp(-s);
    return {c * c * E + n * n * e, c * n * (E - e), n * n * E + c * c * e};
}

double s_of(double u, std::size_t p) { return 0.3 * std::sin(3 * u + 0.1 * p); }
double ds_of(double u, std::size_t p) { return 0.9 * std::cos(3 * u + 0.1 * p); }
double psi_of(double u, std::size_t p) { return 0.5 * u + 0.05 * p; }
double dpsi_of(double, std::size_t) { return 0.5; }

double smooth_q(double u, std::size_t p) {
    // |d gamma_hat|^2 for the rotating family: 2 s'^2 + 8 sinh^2(s) psi'^2
    double s = s_of(u, p), sh = std::sinh(s);
    return 2 * ds_of(u, p) * ds_of(u, p) + 8 * sh * sh * dpsi_of(u, p) * dpsi_of(u, p);
}

Coefficients smooth_coefficients() {
    Coefficients c;
    c.omega = [](double u, std::size_t p) { return std::exp(0.2 * u + 0.01 * p); };
    c.dlog_omega = [](double, std::size_t) { return 0.2; };
    c.dgamma_sq = smooth_q;
    return c;
}

TestFunction dict_phi(const fn::Bump1D& b, const Field& ang) {
    return {[b](double x) { return b(x); }, [b](double x) { return b.derivative(x); }, b.c - b.w, b.c + b.w, ang};
}

}  // namespace

TEST_CASE("dgamma_norm_sq") {
    Sym2 g{1.3, 0.2, 0.9};
    CHECK(dgamma_sq(g, {0, 0, 0}) == 0.0);
    // diagonal family gives 2 s'^2
    const double s = 0.4, ds = 1.7;
    CHECK(dgamma_sq({std::exp(s), 0, std::exp(-s)}, {ds * std::exp(s), 0, -ds * std::exp(-s)}) ==
          doctest::Approx(2 * ds * ds));
    // rotation invariance
    Sym2 dg{0.3, -0.4, 0.7};
    double c = std::cos(0.7), n = std::sin(0.7);
    auto rot = [&](Sym2 m) {
        return Sym2{c * c * m.a + 2 * c * n * m.b + n * n * m.d, -c * n * m.a + (c * c - n * n) * m.b + c * n * m.d,
                    n * n * m.a - 2 * c * n * m.b + c * c * m.d};
    };
    CHECK(dgamma_sq(rot(g), rot(dg)) == doctest::Approx(dgamma_sq(g, dg)));
    // closed form for the rotating family and the sampled version
    auto x = pw::uniform_nodes(0.0, 1.0, 400);
    std::vector<SymField> gh;
    for (double u : x) {
        SymField f{Field(chart.size()), Field(chart.size()), Field(chart.size())};
        for (std::size_t p = 0; p < chart.size(); ++p) {
            Sym2 m = gamma_hat(s_of(u, p), psi_of(u, p));
            f.a[p] = m.a;
            f.b[p] = m.b;
            f.d[p] = m.d;
        }
        gh.push_back(f);
    }
    auto q = dgamma_norm_sq(gh, x[1] - x[0]);
    double e = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t p = 0; p < chart.size(); ++p) e = std::max(e, std::abs(q[i][p] - smooth_q(x[i], p)));
    CHECK(e < 1e-6);
}

TEST_CASE("vacuum constraint: cosine oracle and RK4 order") {
    Coefficients c;
    c.dgamma_sq = [](double, std::size_t) { return 8.0; };
    auto err = [&](std::size_t n) {
        auto x = pw::uniform_nodes(0.0, 1.2, n);
        Solution s = solve_vacuum_constraint(c, x, Field(4, 1.0), Field(4, 0.0));
        double e = 0;
        for (std::size_t i = 0; i < x.size(); ++i) e = std::max(e, std::abs(s.Phi[i][0] - std::cos(x[i])));
        return e;
    };
    CHECK(err(100) < 1e-9);
    CHECK(std::log2(err(25) / err(50)) >= 3.9);

    Coefficients flat;
    auto x = pw::uniform_nodes(0.0, 1.0, 10);
    Solution s = solve_vacuum_constraint(flat, x, Field(2, 1.0), Field(2, 0.3));
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(s.Phi[i][1] == doctest::Approx(1 + 0.3 * x[i]).epsilon(1e-14));
}

TEST_CASE("constraint solve reports focusing") {
    Coefficients c;
    c.dgamma_sq = [](double, std::size_t) { return 8.0; };
    auto x = pw::uniform_nodes(0.0, 3.0, 300);
    CHECK_THROWS_AS(solve_vacuum_constraint(c, x, Field(1, 1.0), Field(1, 0.0)), NumericalError);
}

TEST_CASE("smooth dust: consistency, first integral, comparison") {
    Coefficients c = smooth_coefficients();
    auto x = pw::uniform_nodes(0.0, 1.0, 400);
    NullDustMeasure zero;
    zero.density = [](double, std::size_t) { return 0.0; };
    Solution a = solve_constraint(c, zero, x, Field(chart.size(), 1.0), Field(chart.size(), 0.1));
    Solution b = solve_vacuum_constraint(c, x, Field(chart.size(), 1.0), Field(chart.size(), 0.1));
    CHECK(a.Phi == b.Phi);

    const double cc = 0.6;
    NullDustMeasure dust;
    dust.density = [&](double, std::size_t) { return cc; };
    Solution d = solve_constraint(Coefficients{}, dust, x, Field(1, 1.0), Field(1, 0.0));
    double drift = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double E = 0.5 * d.dPhi[i][0] * d.dPhi[i][0] + 0.5 * cc * std::log(d.Phi[i][0]);
        drift = std::max(drift, std::abs(E));
        CHECK(d.ddPhi[i][0] <= 0.0);
    }
    CHECK(drift <= 1e-8);

    NullDustMeasure more;
    more.density = [](double u, std::size_t) { return 0.6 + 0.4 * std::sin(5 * u) * std::sin(5 * u); };
    Solution e = solve_constraint(Coefficients{}, more, x, Field(1, 1.0), Field(1, 0.0));
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(e.Phi[i][0] <= d.Phi[i][0]);
}

TEST_CASE("point locality is bitwise") {
    Coefficients c = smooth_coefficients();
    NullDustMeasure dust;
    dust.density = [](double u, std::size_t p) { return 0.3 + 0.1 * std::sin(u + p); };
    auto x = pw::uniform_nodes(0.0, 1.0, 64);
    Field P0(chart.size(), 1.0), D0(chart.size(), 0.2);
    Solution all = solve_constraint(c, dust, x, P0, D0);
    std::vector<std::size_t> sub{3, 17, 40};
    Solution part = solve_constraint(c, dust, x, P0, D0, sub);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t k = 0; k < sub.size(); ++k) {
            CHECK(part.Phi[i][k] == all.Phi[i][sub[k]]);
            CHECK(part.dPhi[i][k] == all.dPhi[i][sub[k]]);
        }
}

TEST_CASE("weak residual of strong solutions") {
    Coefficients c = smooth_coefficients();
    auto x = pw::uniform_nodes(0.0, 1.0, 2000);
    Field ang = angular_factor();
    Field P0(chart.size(), 1.0), D0(chart.size(), 0.1);

    Solution v = solve_vacuum_constraint(c, x, P0, D0);
    for (const auto& b : fn::bump_dictionary(0.0, 1.0))
        CHECK(std::abs(weak_constraint_residual(v, c, NullDustMeasure{}, dict_phi(b, ang), chart)) <= 1e-8);

    NullDustMeasure dust;
    dust.density = [](double u, std::size_t p) { return 0.5 + 0.3 * std::cos(4 * u + 0.2 * p); };
    Solution d = solve_constraint(c, dust, x, P0, D0);
    for (const auto& b : fn::bump_dictionary(0.0, 1.0))
        CHECK(std::abs(weak_constraint_residual(d, c, dust, dict_phi(b, ang), chart)) <= 1e-8);

    CHECK_THROWS_AS(weak_constraint_residual(v, c, NullDustMeasure{}, dict_phi({0.05, 0.1}, ang), chart), UsageError);
}

TEST_CASE("glued shell solution satisfies the weak identity") {
    Coefficients c = smooth_coefficients();
    auto x = pw::uniform_nodes(0.0, 1.0, 2000);
    NullDustMeasure shell;
    shell.atoms.push_back({0.5, sample(chart, [](double t1, double) { return 0.3 * (1.0 + 0.5 * std::cos(2 * pi * t1)); })});
    Field P0(chart.size(), 1.0), D0(chart.size(), 0.1);
    Solution s = solve_constraint(c, shell, x, P0, D0);
    REQUIRE(s.ubar.size() == x.size() + 1);
    // jump in Phi' equals -Omega^2 m / (2 Phi)
    std::size_t j = 1000;
    CHECK(s.ubar[j] == s.ubar[j + 1]);
    for (std::size_t p = 0; p < chart.size(); ++p) {
        double O = c.omega(0.5, p);
        CHECK(s.dPhi[j + 1][p] - s.dPhi[j][p] ==
              doctest::Approx(-0.5 * O * O * shell.atoms[0].mass[p] / s.Phi[j][p]).epsilon(1e-14));
    }
    Field ang = angular_factor();
    double worst = 0, worst_dropped = 0;
    for (const auto& b : fn::bump_dictionary(0.0, 1.0)) {
        worst = std::max(worst, std::abs(weak_constraint_residual(s, c, shell, dict_phi(b, ang), chart)));
        worst_dropped = std::max(worst_dropped, std::abs(weak_constraint_residual(s, c, NullDustMeasure{}, dict_phi(b, ang), chart)));
    }
    CHECK(worst <= 1e-6);
    CHECK(worst_dropped > 1e-3);

    NullDustMeasure edge;
    edge.atoms.push_back({0.0, Field(chart.size(), 1.0)});
    CHECK_THROWS_AS(solve_constraint(c, edge, x, P0, D0), UsageError);
}

TEST_CASE("chi_from_data") {
    const std::size_t P = chart.size();
    auto x = pw::uniform_nodes(0.0, 1.0, 200);
    const double h = x[1] - x[0];
    std::vector<Field> Om, Ph, dPh;
    std::vector<SymField> gh, gconst;
    for (double u : x) {
        Field o(P), f(P), df(P);
        SymField g{Field(P), Field(P), Field(P)}, g0{Field(P, 1.0), Field(P, 0.0), Field(P, 1.0)};
        for (std::size_t p = 0; p < P; ++p) {
            o[p] = std::exp(0.2 * u + 0.01 * p);
            f[p] = 1 + 0.5 * u + 0.1 * std::sin(u + p);
            df[p] = 0.5 + 0.1 * std::cos(u + p);
            Sym2 m = gamma_hat(s_of(u, p), psi_of(u, p));
            g.a[p] = m.a;
            g.b[p] = m.b;
            g.d[p] = m.d;
        }
        Om.push_back(o);
        Ph.push_back(f);
        dPh.push_back(df);
        gh.push_back(g);
        gconst.push_back(g0);
    }
    ChiData c0 = chi_from_data(h, Om, Ph, dPh, gconst);
    CHECK(c0.identity_error < 1e-8);
    for (auto& f : c0.chihat_sq) CHECK(max_abs(f) < 1e-16);

    ChiData c1 = chi_from_data(h, Om, Ph, dPh, gh);
    CHECK(c1.identity_error < 1e-6);
    double e = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t p = 0; p < P; ++p) {
            double O = Om[i][p];
            e = std::max(e, std::abs(c1.chihat_sq[i][p] - 0.25 * smooth_q(x[i], p) / (O * O)));
        }
    CHECK(e < 1e-6);

    // Minkowski cone at u = 0: Omega = 1, Phi = ubar + 1
    std::vector<Field> one(x.size(), Field(P, 1.0)), cone, dcone(x.size(), Field(P, 1.0));
    for (double u : x) cone.push_back(Field(P, u + 1));
    ChiData mk = chi_from_data(h, one, cone, dcone, gconst);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(mk.trchi[i][0] == doctest::Approx(2 / (x[i] + 1)).epsilon(1e-10));
}

TEST_CASE("christodoulou_mass") {
    auto x = pw::uniform_nodes(0.0, 1.0, 100);
    std::vector<Field> zero(x.size(), Field(3, 0.0));
    CHECK(christodoulou_mass(x, zero, 1.0).infimum == 0.0);
    std::vector<Field> sq;
    for (double u : x) sq.push_back(Field{u * u, 1.0 + u, std::exp(u)});
    MassFunctional whole = christodoulou_mass(x, sq, 1.0);
    MassFunctional left = christodoulou_mass(x, sq, 0.5);
    std::vector<double> xr(x.begin() + 50, x.end());
    std::vector<Field> sr(sq.begin() + 50, sq.end());
    MassFunctional right = christodoulou_mass(xr, sr, 1.0);
    for (int p = 0; p < 3; ++p) CHECK(whole.per_point[p] == doctest::Approx(left.per_point[p] + right.per_point[p]));
    CHECK(whole.per_point[0] == doctest::Approx(1.0 / 3.0));
    CHECK(whole.infimum == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(christodoulou_mass(x, sq, 0.123), UsageError);
}
