#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hfl/error.hpp"
#include "hfl/gowdy.hpp"
#include "hfl/rate_fit.hpp"

using namespace hfl;
using namespace hfl::gowdy;
using std::numbers::pi;

namespace {
// J_k(x) = (1/pi) int_0^pi cos(k t - x sin t) dt; periodic trapezoid on [0, 2 pi].
double bessel_quadrature(int k, double x) {
    const int m = 4096 + static_cast<int>(4 * x);
    double s = 0;
    for (int i = 0; i < m; ++i) {
        double t = 2 * pi * i / m;
        s += std::cos(k * t - x * std::sin(t));
    }
    return s / m;
}
}  // namespace

TEST_CASE("bessel_j") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_j(1, 0.0) == 0.0);
    CHECK(bessel_j(2, 0.0) == 0.0);
    CHECK(bessel_j(0, 1.0) == doctest::Approx(bessel_quadrature(0, 1.0)).epsilon(1e-9));
    for (int k = 0; k <= 2; ++k)
        for (double x : {0.3, 2.0, 7.5, 11.9, 12.1, 15.0, 30.0, 77.7, 250.0})
            CHECK(std::abs(bessel_j(k, x) - bessel_quadrature(k, x)) < 1e-10 * std::max(1.0, std::abs(bessel_j(k, x))));
    CHECK_THROWS_AS(bessel_j(0, -1.0), UsageError);
}

TEST_CASE("Hankel average of the alpha combination") {
    for (double x0 : {50.0, 120.0, 400.0}) {
        const int m = 2000;
        double s = 0;
        for (int i = 0; i < m; ++i) {
            double x = x0 + pi * i / m;
            double j0 = bessel_j(0, x), j1 = bessel_j(1, x), j2 = bessel_j(2, x);
            s += j0 * j0 + 2 * j1 * j1 - j0 * j2;
        }
        s /= m;
        double target = 4 / (pi * x0);
        CHECK(std::abs(s - target) / target <= 2 / x0);
    }
}

TEST_CASE("eval_family") {
    Grid1D tau(0.0, 1.0, 65), th(0.0, 2 * pi / 8, 65);
    Family z = eval_family(8, 0.0, tau, th);
    CHECK(max_abs(z.P) == 0.0);
    CHECK(max_abs(z.alpha) == 0.0);
    CHECK_THROWS_AS(eval_family(64, 1.0, tau, th), UsageError);

    for (int n : {4, 8}) {
        Family f = eval_family(n, 1.0, tau, th);
        double bound = 1.0 / std::sqrt(n);  // sup |J0| <= 1
        CHECK(max_abs(f.P) <= bound);
    }
}

TEST_CASE("alpha_n tends to -A^2 e^{-tau} / pi") {
    const double A = 1.3;
    std::vector<double> ns, gaps;
    for (int n : {100, 316, 1000, 3162, 10000, 31623, 100000}) {
        ns.push_back(n);
        gaps.push_back(alpha_gap_sup(n, A, 0.0, 1.0));
    }
    CHECK(monotone_decreasing(gaps));
    // theta sup in closed form agrees with a sampled sup
    double tau = 0.4, s = 0;
    for (int i = 0; i < 4000; ++i) {
        double t = 2 * pi * i / 4000.0;
        s = std::max(s, std::abs(alpha_at(50, A, tau, t) + A * A * std::exp(-tau) / pi));
    }
    CHECK(s == doctest::Approx(alpha_gap_sup_theta(50, A, tau)).epsilon(1e-4));
    CHECK(fit_rate(ns, gaps).slope < -0.5);
}

TEST_CASE("vacuum residual converges at fourth order") {
    Grid1D tau(0.0, 1.0, 65), th(0.0, 2 * pi / 8, 65);
    VacuumResidual v = vacuum_residual(8, 1.0, tau, th);
    CHECK(v.order >= 3.5);
    CHECK_FALSE(v.underresolved);

    // A = 0: the background is exactly vacuum, so the residual is pure truncation error.
    VacuumResidual z = vacuum_residual(8, 0.0, tau, th);
    CHECK(z.order >= 3.5);
    CHECK(z.residual < v.residual);

    Grid1D shifted(2 * pi / 8, 4 * pi / 8, 65);
    VacuumResidual s = vacuum_residual(8, 1.0, tau, shifted);
    CHECK(s.residual == doctest::Approx(v.residual).epsilon(1e-6));
}

TEST_CASE("limit Einstein tensor") {
    LimitEinstein z = limit_einstein(0.0, 0.3);
    CHECK(std::abs(z.G_tautau) < 1e-7);
    CHECK(std::abs(z.G_thetatheta) < 1e-7);

    LimitEinstein e = limit_einstein(1.0, 0.0);
    CHECK(std::abs(e.G_tautau - 1 / (4 * pi)) < 1e-5);
    CHECK(std::abs(e.G_thetatheta - 1 / (4 * pi)) < 1e-5);
    for (double tau : {-0.5, 0.7, 1.5}) {
        LimitEinstein g = limit_einstein(1.0, tau);
        CHECK(std::abs(g.G_tautau - g.target_tautau) < 1e-5);
        CHECK(std::abs(g.G_thetatheta - g.target_thetatheta) < 1e-5 * std::exp(tau));
        CHECK(g.G_thetatheta / g.G_tautau == doctest::Approx(std::exp(2 * tau)).epsilon(1e-5));
        CHECK(g.max_other < 1e-8);
        CHECK(g.G_uu == doctest::Approx(g.G_ubub).epsilon(1e-8));
        CHECK(g.G_uu == doctest::Approx(std::exp(tau) / (8 * pi)).epsilon(1e-5));
        CHECK(std::abs(g.G_uub) < 1e-6);
    }
}

TEST_CASE("g_n converges uniformly to the limit metric") {
    std::vector<double> ns, gaps;
    for (int n : {4, 8, 16, 32}) {
        Grid1D tau(0.0, 1.0, 16 * n + 1), th(0.0, 2 * pi / 4, 32 * n + 1);
        ns.push_back(n);
        gaps.push_back(metric_gap(n, 1.0, tau, th));
    }
    CHECK(fit_rate(ns, gaps).slope <= -0.45);
}
