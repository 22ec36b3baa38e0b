#include <cmath>

#include "doctest.h"
#include "hfl/error.hpp"
#include "hfl/spacetime.hpp"

using namespace hfl;

namespace {

// Coordinates (u, ubar, X, Y) with g = -2 du dubar + e^G dX^2 + e^{-G} dY^2, H = 1.
MetricBlock burnett_block(std::size_t n, double (*G)(double)) {
    MetricBlock m;
    m.labels = {"u", "ubar", "X", "Y"};
    m.nactive = 1;
    m.active = {1, -1};
    m.axis0 = Grid1D(0.0, 1.0, n);
    m.allocate();
    for (std::size_t p = 0; p < m.size(); ++p) {
        double g = G(m.axis0.x(p));
        m.set(0, 1, p, -1.0);
        m.set(2, 2, p, std::exp(g));
        m.set(3, 3, p, std::exp(-g));
    }
    return m;
}

double psi(double t, double x) { return 0.2 * std::sin(t + 2 * x) + 0.1 * t * x; }
// box psi = -psi_tt + psi_xx
double box_psi(double t, double x) { return 0.2 * std::sin(t + 2 * x) - 0.8 * std::sin(t + 2 * x); }

// g = e^{2 psi}(-dt^2 + dx^2) + dy^2 + dz^2
MetricBlock conformal_block(std::size_t n) {
    MetricBlock m;
    m.labels = {"t", "x", "y", "z"};
    m.axis0 = Grid1D(0.0, 1.0, n);
    m.axis1 = Grid1D(0.0, 1.0, n);
    m.allocate();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t p = i * n + j;
            double e = std::exp(2 * psi(m.axis0.x(i), m.axis1.x(j)));
            m.set(0, 0, p, -e);
            m.set(1, 1, p, e);
            m.set(2, 2, p, 1.0);
            m.set(3, 3, p, 1.0);
        }
    return m;
}

double conformal_error(std::size_t n) {
    MetricBlock m = conformal_block(n);
    RicciResult r = spacetime_ricci(m);
    double err = 0;
    for (std::size_t p = 0; p < m.size(); ++p) {
        if (!interior(m, p, r.margin)) continue;
        double b = box_psi(m.axis0.x(p / n), m.axis1.x(p % n));
        err = std::max(err, std::abs(r.ric.g[0][0][p] - b));
        err = std::max(err, std::abs(r.ric.g[1][1][p] + b));
        err = std::max(err, std::abs(r.ric.g[0][1][p]));
        err = std::max(err, std::abs(r.ric.g[2][2][p]));
    }
    return err;
}

}  // namespace

TEST_CASE("Minkowski block has zero Ricci") {
    MetricBlock m;
    m.labels = {"u", "ubar", "X", "Y"};
    m.active = {0, 1};
    m.axis0 = Grid1D(0, 1, 17);
    m.axis1 = Grid1D(0, 1, 17);
    m.allocate();
    for (std::size_t p = 0; p < m.size(); ++p) {
        m.set(0, 1, p, -1.0);
        m.set(2, 2, p, 1.0);
        m.set(3, 3, p, 1.0);
    }
    RicciResult r = spacetime_ricci(m);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) CHECK(max_abs(r.ric.g[a][b]) == 0.0);
    CHECK_FALSE(r.underresolved);
}

TEST_CASE("plane wave G = ubar^2, H = 1 gives Ric_ubar ubar = -2 ubar^2") {
    MetricBlock m = burnett_block(401, [](double x) { return x * x; });
    RicciResult r = spacetime_ricci(m);
    double err = 0, other = 0;
    for (std::size_t p = 0; p < m.size(); ++p) {
        if (!interior(m, p, r.margin)) continue;
        double x = m.axis0.x(p);
        err = std::max(err, std::abs(r.ric.g[1][1][p] + 2 * x * x));
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                if (a != 1 || b != 1) other = std::max(other, std::abs(r.ric.g[a][b][p]));
    }
    CHECK(err < 1e-8);
    CHECK(other < 1e-8);
}

TEST_CASE("Ricci converges at fourth order on a two-variable metric") {
    double e1 = conformal_error(41), e2 = conformal_error(81), e3 = conformal_error(161);
    CHECK(std::log2(e1 / e2) >= 3.5);
    CHECK(std::log2(e2 / e3) >= 3.5);
}

TEST_CASE("Einstein tensor trace is minus the scalar curvature") {
    MetricBlock m = conformal_block(41);
    RicciResult r = spacetime_ricci(m);
    MetricBlock G = einstein_tensor(m, r);
    for (std::size_t p = 0; p < m.size(); p += 37) {
        double e = std::exp(2 * psi(m.axis0.x(p / 41), m.axis1.x(p % 41)));
        double tr = -G.g[0][0][p] / e + G.g[1][1][p] / e + G.g[2][2][p] + G.g[3][3][p];
        CHECK(tr == doctest::Approx(-r.scalar[p]).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("non-Lorentzian metric is rejected with its sample index") {
    MetricBlock m = conformal_block(9);
    m.set(0, 0, 13, 2.0);
    try {
        spacetime_ricci(m);
        FAIL("expected throw");
    } catch (const NumericalError& e) {
        CHECK(e.index() == 13);
    }
}

TEST_CASE("under-resolved oscillation raises the warning flag") {
    MetricBlock coarse = burnett_block(41, [](double x) { return 0.1 * std::sin(2 * M_PI * 10 * x); });
    CHECK(spacetime_ricci(coarse).underresolved);
    MetricBlock fine = burnett_block(801, [](double x) { return 0.1 * std::sin(2 * M_PI * 10 * x); });
    CHECK_FALSE(spacetime_ricci(fine).underresolved);
}

TEST_CASE("spacetime_ricci is pure") {
    MetricBlock m = conformal_block(21);
    auto a = spacetime_ricci(m), b = spacetime_ricci(m);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(a.ric.g[i][j] == b.ric.g[i][j]);
}
