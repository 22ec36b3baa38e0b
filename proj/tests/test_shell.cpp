#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "hfl/error.hpp"
#include "hfl/functions.hpp"
#include "hfl/hf_approx.hpp"
#include "hfl/shell.hpp"

using namespace hfl;
using namespace hfl::shell;

namespace {

constexpr double kPi = std::numbers::pi;

AngularGrid chart() { return AngularGrid(8, 4, 1.0, 1.0); }

double theta1(std::size_t p) { return chart().theta1(p / chart().n2); }
double theta2(std::size_t p) { return chart().theta2(p % chart().n2); }

// phi = (1 + 0.4 cos(2 pi theta1) sin(2 pi theta2)) cos(ubar + u / 2) exp(ubar / 3).
ShellTestFn smooth_test() {
    auto ang = [](std::size_t p) { return 1.0 + 0.4 * std::cos(2 * kPi * theta1(p)) * std::sin(2 * kPi * theta2(p)); };
    ShellTestFn f;
    f.phi = [ang](double u, double ub, std::size_t p) { return ang(p) * std::cos(ub + 0.5 * u) * std::exp(ub / 3); };
    f.d_ubar = [ang](double u, double ub, std::size_t p) {
        return ang(p) * std::exp(ub / 3) * (-std::sin(ub + 0.5 * u) + std::cos(ub + 0.5 * u) / 3);
    };
    f.d_u = [ang](double u, double ub, std::size_t p) { return -0.5 * ang(p) * std::sin(ub + 0.5 * u) * std::exp(ub / 3); };
    return f;
}

double mass_fn(double t1, double t2) { return 0.8 + 0.3 * std::cos(2 * kPi * t1) + 0.1 * std::sin(2 * kPi * t2); }

}  // namespace

TEST_CASE("Cone coefficients") {
    auto [a, b] = cone_coefficients(0.0, 0.0);
    CHECK(a == 2.0);
    CHECK(b == -2.0);
    for (double u : {0.1, 0.3, 0.6})
        for (double ub : {-0.3, -0.05, 0.0}) {
            if (!(u < ub + 1)) continue;
            auto [t, tb] = cone_coefficients(u, ub);
            CHECK(t + tb == 0.0);
            CHECK(t == doctest::Approx(2.0 / (ub - u + 1)).epsilon(1e-15));
        }
    for (double eps : {1e-3, 1e-6, 1e-9, 1e-12}) CHECK(cone_coefficients(0.5 - eps, -0.5).first > 1.0 / eps);
    CHECK_THROWS_AS(cone_coefficients(0.5, -0.5), UsageError);
    CHECK_THROWS_AS(cone_coefficients(-0.1, 0.0), UsageError);
    CHECK_THROWS_AS(cone_coefficients(0.1, 0.2), UsageError);
}

TEST_CASE("trchi jump across the shell") {
    auto zero = make_shell(chart(), [](double, double) { return 0.0; }, 0.5);
    for (double v : trch_jump(zero, 0.5)) CHECK(v == cone_coefficients(0.5, 0.0).first);
    auto one = make_shell(chart(), [](double, double) { return 1.0; }, 0.5);
    for (double v : trch_jump(one, 0.5)) CHECK(v == 0.0);
    auto heavy = make_shell(chart(), [](double, double) { return 1.2; }, 0.5);
    for (double v : trch_jump(heavy, 0.5)) CHECK(v == doctest::Approx(-0.8).epsilon(1e-14));
    for (double u : {0.0, 0.2, 0.7}) {
        auto j = trch_jump(heavy, u);
        for (double v : j) CHECK(v == doctest::Approx(2 / (1 - u) - 1.2 / ((1 - u) * (1 - u))).epsilon(1e-14));
    }
    CHECK_THROWS_AS(make_shell(chart(), [](double, double) { return -0.1; }, 0.5), UsageError);
    CHECK_THROWS_AS(make_shell(chart(), [](double, double) { return 1.0; }, 1.0), UsageError);
}

TEST_CASE("Trapped-surface criterion") {
    for (double us : {0.2, 0.5, 0.8}) {
        const double thr = 2 * (1 - us);
        auto marginal = make_shell(chart(), [thr](double, double) { return thr; }, us);
        auto t = is_trapped(marginal);
        CHECK_FALSE(t.overall);
        CHECK(t.margin == 0.0);
        auto above = make_shell(chart(), [thr](double, double) { return thr + 0.1; }, us);
        auto a = is_trapped(above);
        CHECK(a.overall);
        CHECK(a.fraction == 1.0);
        CHECK(a.trchib < 0.0);
    }
    // Mass dipping below threshold for theta1 < 1/2 only.
    auto dip = make_shell(chart(), [](double t1, double) { return t1 < 0.5 ? 0.5 : 1.5; }, 0.5);
    auto d = is_trapped(dip);
    CHECK_FALSE(d.overall);
    for (std::size_t p = 0; p < chart().size(); ++p) CHECK(static_cast<bool>(d.trapped[p]) == (theta1(p) >= 0.5));
    CHECK(d.fraction == doctest::Approx(0.5));

    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int disagree = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double us = 0.02 + 0.96 * U(rng);
        const double c0 = 2.5 * U(rng), c1 = 0.5 * U(rng), c2 = 0.5 * U(rng);
        auto s = make_shell(
            chart(), [=](double t1, double t2) {
                return std::max(0.0, c0 + c1 * std::cos(2 * kPi * t1) + c2 * std::sin(2 * kPi * t2));
            },
            us);
        double inf = std::numeric_limits<double>::infinity();
        for (double v : s.m) inf = std::min(inf, v);
        if (is_trapped(s).overall != (inf > 2 * (1 - us))) ++disagree;
    }
    CHECK(disagree == 0);
}

TEST_CASE("Weak trchi residual across the shell") {
    const auto f = smooth_test();
    auto none = make_shell(chart(), [](double, double) { return 0.0; }, 0.5);
    CHECK(std::abs(weak_trch_residual(none, f, 0.3, -0.4, 0.3)) < 1e-10);

    auto s = make_shell(chart(), mass_fn, 0.5);
    for (double u : {0.0, 0.3, 0.5}) {
        const double r = weak_trch_residual(s, f, u, -0.4, 0.2);
        const double dropped = weak_trch_residual(s, f, u, -0.4, 0.2, false);
        const double pair = measure_pairing(s, f, u);
        MESSAGE("u=" << u << " residual " << r << " without measure " << dropped << " pairing " << pair);
        CHECK(std::abs(r) < 1e-6);
        CHECK(std::abs(dropped) >= 0.5 * std::abs(pair));
        CHECK(dropped == doctest::Approx(-pair).epsilon(1e-8));
    }
    // Linear in m: the residual without the measure term scales with the mass.
    auto s2 = make_shell(chart(), [](double a, double b) { return 2.0 * mass_fn(a, b); }, 0.5);
    CHECK(weak_trch_residual(s2, f, 0.3, -0.4, 0.2, false) ==
          doctest::Approx(2.0 * weak_trch_residual(s, f, 0.3, -0.4, 0.2, false)).epsilon(1e-10));
    CHECK_THROWS_AS(weak_trch_residual(s, f, 0.7, -0.4, 0.2), UsageError);
    auto heavy = make_shell(chart(), [](double, double) { return 5.0; }, 0.5);
    CHECK_THROWS_AS(weak_trch_residual(heavy, f, 0.0, -0.4, 0.9), UsageError);
}

TEST_CASE("Dust propagation along u") {
    auto s = make_shell(chart(), mass_fn, 0.5);
    ShellTestFn still;
    still.phi = [](double, double ub, std::size_t p) { return (1.0 + theta1(p)) * fn::bump((ub - 0.5) / 0.3); };
    still.d_ubar = [](double, double, std::size_t) { return 0.0; };
    still.d_u = [](double, double, std::size_t) { return 0.0; };
    CHECK(dust_propagation_residual(s, still, 0.1, 0.8, 0.5) == 0.0);

    ShellTestFn lin;
    lin.phi = [](double u, double, std::size_t p) { return u * (1.0 + std::sin(2 * kPi * theta2(p))); };
    lin.d_ubar = [](double, double, std::size_t) { return 0.0; };
    lin.d_u = [](double, double, std::size_t p) { return 1.0 + std::sin(2 * kPi * theta2(p)); };
    CHECK(std::abs(dust_propagation_residual(s, lin, 0.1, 0.8, 0.5)) < 1e-12);

    const auto f = smooth_test();
    CHECK(std::abs(dust_propagation_residual(s, f, 0.0, 0.9, 0.5)) < 1e-10);
    auto none = make_shell(chart(), [](double, double) { return 0.0; }, 0.5);
    CHECK(dust_propagation_residual(none, f, 0.0, 0.9, 0.5) == 0.0);
}

TEST_CASE("Shell mass recovered from vacuum approximants matches the trapping threshold") {
    hf::Background bg;
    bg.chart = chart();
    bg.gamma = [](double, std::size_t) { return Sym2{1.0, 0.0, 1.0}; };
    bg.ustar = 1.0;
    bg.Phi0.assign(chart().size(), 0.8);
    bg.dPhi0.assign(chart().size(), 0.0);
    cons::NullDustMeasure nu;
    nu.atoms.push_back({0.5, sample(chart(), [](double t1, double) {
                            const double dist = std::min(t1, 1.0 - t1);
                            return (1.0 + 0.5 * std::cos(2 * kPi * t1)) * fn::smooth_step((dist - 1.0 / 16) / (1.0 / 16));
                        })});
    const Field zero(chart().size(), 0.0), Phi_shell(chart().size(), 0.8);
    double prev = std::numeric_limits<double>::infinity();
    for (int m : {3, 5}) {
        auto st = hf::approx_pipeline(nu, bg, m);
        auto it = std::lower_bound(st.nodes.begin(), st.nodes.end(), 0.75);
        auto mass = hf::pipeline_mass(st, bg, *it);
        Field meff = mass_from_energy_gap(mass.per_point, zero, Phi_shell);
        double gap = 0.0;
        for (std::size_t p = 0; p < meff.size(); ++p) gap = std::max(gap, std::abs(meff[p] - nu.atoms[0].mass[p]));
        MESSAGE("m=" << m << " recovered mass gap " << gap);
        CHECK(gap < prev);
        prev = gap;
        for (double us : {0.3, 0.5, 0.7, 0.9}) {
            ShellSpacetime exact{chart(), nu.atoms[0].mass, us};
            ShellSpacetime approx{chart(), meff, us};
            auto a = is_trapped(exact), b = is_trapped(approx);
            CHECK(a.overall == b.overall);
            CHECK(std::abs(a.margin - b.margin) <= gap);
            for (std::size_t p = 0; p < meff.size(); ++p)
                if (std::abs(nu.atoms[0].mass[p] - 2 * (1 - us)) > gap) CHECK(a.trapped[p] == b.trapped[p]);
        }
    }
    CHECK(prev < 1e-2);
}
