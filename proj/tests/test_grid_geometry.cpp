#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hfl/error.hpp"
#include "hfl/geometry.hpp"
#include "hfl/grid.hpp"
#include "hfl/spectral.hpp"

using namespace hfl;
using std::numbers::pi;

namespace {

AngularGrid chart(std::size_t n, double L1 = 2.0, double L2 = 3.0) { return AngularGrid(n, n, L1, L2); }

TensorField2 flat(const AngularGrid& g) {
    return TensorField2::sym2(Field(g.size(), 1.0), Field(g.size(), 0.0), Field(g.size(), 1.0));
}

// Smooth random periodic field from a few low Fourier modes.
Field random_smooth(const AngularGrid& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    double c[3][3], s[3][3];
    for (auto& r : c)
        for (auto& v : r) v = u(rng);
    for (auto& r : s)
        for (auto& v : r) v = u(rng);
    return sample(g, [&](double x, double y) {
        double v = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double ph = 2 * pi * (i * x / g.L1 + (j - 1) * y / g.L2);
                v += 0.2 * (c[i][j] * std::cos(ph) + s[i][j] * std::sin(ph));
            }
        return v;
    });
}

double conformal_error(std::size_t n) {
    AngularGrid g = chart(n);
    const double w = 2 * pi / g.L1;
    Field psi = sample(g, [&](double x, double) { return 0.1 * std::sin(w * x); });
    Field e2 = psi;
    for (auto& v : e2) v = std::exp(2 * v);
    auto K = gauss_curvature(TensorField2::sym2(e2, Field(g.size(), 0.0), e2), g);
    double err = 0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        double lap = -w * w * psi[p];
        double exact = -std::exp(-2 * psi[p]) * lap;
        err = std::max(err, std::abs(K.K[p] - exact));
    }
    return err;
}

}  // namespace

TEST_CASE("Grid1D and AngularGrid invariants") {
    CHECK_THROWS_AS(Grid1D(1.0, 0.0, 10), UsageError);
    CHECK_THROWS_AS(Grid1D(0.0, 1.0, 1), UsageError);
    CHECK_THROWS_AS(AngularGrid(3, 8, 1, 1), UsageError);
    Grid1D g(0.0, 1.0, 11);
    CHECK(g.h() == doctest::Approx(0.1));
    CHECK(g.node_of(0.3) == 3);
    CHECK(g.node_of(0.35) == -1);
}

TEST_CASE("fd4 derivative is fourth order including the closures") {
    auto err = [](std::size_t n) {
        Grid1D g(0.0, 1.0, n);
        Field f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(3 * g.x(i)) * std::exp(g.x(i));
        Field d = fd4_derivative(f, g.h());
        double e = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double x = g.x(i);
            e = std::max(e, std::abs(d[i] - (3 * std::cos(3 * x) + std::sin(3 * x)) * std::exp(x)));
        }
        return e;
    };
    double order = std::log2(err(101) / err(201));
    CHECK(order > 3.7);
}

TEST_CASE("quadrature and interpolation") {
    Grid1D g(0.0, 2.0, 41);
    auto x = g.points();
    Field y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::exp(x[i]);
    CHECK(integrate(x, y) == doctest::Approx(std::exp(2.0) - 1).epsilon(1e-7));
    // odd number of intervals uses the 3/8 tail
    std::vector<double> x2(x.begin(), x.begin() + 40), y2(y.begin(), y.begin() + 40);
    CHECK(integrate(x2, y2) == doctest::Approx(std::exp(x2.back()) - 1).epsilon(1e-7));
    // a repeated node splits the integral at a jump
    std::vector<double> xs{0, 0.5, 1, 1, 1.5, 2};
    std::vector<double> ys{1, 1, 1, 3, 3, 3};
    CHECK(integrate(xs, ys) == doctest::Approx(4.0));
    CHECK(interp_cubic(y, 0.0, g.h(), 0.73) == doctest::Approx(std::exp(0.73)).epsilon(1e-7));
}

TEST_CASE("FFT round trip and Parseval on rank 2") {
    AngularGrid g = chart(16);
    Field f = random_smooth(g, 3);
    const RealFFT& fft = fft_for({16, 16});
    Field back = fft.inverse(fft.forward(f));
    CHECK(max_abs_diff(f, back) < 1e-13);
}

TEST_CASE("christoffel examples") {
    AngularGrid g = chart(32);
    TensorField2 G0 = christoffel(flat(g), g);
    for (auto& c : G0.comp) CHECK(max_abs(c) < 1e-13);

    const double w = 2 * pi / g.L1;
    Field a = sample(g, [&](double x, double) { return 1 + 0.5 * std::sin(w * x); });
    TensorField2 G = christoffel(TensorField2::sym2(a, Field(g.size(), 0.0), Field(g.size(), 1.0)), g);
    double err = 0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        double x = g.theta1(p / g.n2);
        double exact = (pi / (2 * g.L1)) * std::cos(w * x) / (1 + 0.5 * std::sin(w * x));
        err = std::max(err, std::abs(G.at({0, 0, 0})[p] - exact));
    }
    CHECK(err < 1e-10);
    for (int C = 0; C < 2; ++C)
        for (int A = 0; A < 2; ++A)
            for (int B = 0; B < 2; ++B)
                if (!(C == 0 && A == 0 && B == 0)) CHECK(max_abs(G.at({C, A, B})) < 1e-12);

    TensorField2 gr = TensorField2::sym2(Field(g.size(), 1.0), Field(g.size(), 0.0), Field(g.size(), 1.0));
    Field r1 = random_smooth(g, 7), r2 = random_smooth(g, 8), r3 = random_smooth(g, 9);
    for (std::size_t p = 0; p < g.size(); ++p) {
        gr.comp[0][p] = 2 + 0.5 * r1[p];
        gr.comp[1][p] = gr.comp[2][p] = 0.2 * r2[p];
        gr.comp[3][p] = 2 + 0.5 * r3[p];
    }
    TensorField2 Gr = christoffel(gr, g);
    for (int C = 0; C < 2; ++C) CHECK(Gr.at({C, 0, 1}) == Gr.at({C, 1, 0}));
}

TEST_CASE("christoffel rejects a non-positive-definite metric") {
    AngularGrid g = chart(8);
    TensorField2 bad = flat(g);
    bad.comp[0][g.index(2, 3)] = -1.0;
    try {
        christoffel(bad, g);
        FAIL("expected throw");
    } catch (const NumericalError& e) {
        CHECK(e.index() == static_cast<long>(g.index(2, 3)));
    }
}

TEST_CASE("gauss curvature: flat, conformal oracle, Gauss-Bonnet") {
    AngularGrid g = chart(32);
    CHECK(max_abs(gauss_curvature(flat(g), g).K) < 1e-12);
    CHECK(conformal_error(32) < 1e-10);

    TensorField2 gr = flat(g);
    Field r1 = random_smooth(g, 17), r2 = random_smooth(g, 18), r3 = random_smooth(g, 19);
    for (std::size_t p = 0; p < g.size(); ++p) {
        gr.comp[0][p] = 2 + 0.5 * r1[p];
        gr.comp[1][p] = gr.comp[2][p] = 0.2 * r2[p];
        gr.comp[3][p] = 2 + 0.5 * r3[p];
    }
    SurfaceGeometry geo(gr, g);
    auto K = gauss_curvature(gr, g);
    CHECK(std::abs(integrate_chart(g, K.K, geo.area_density())) < 1e-9);
}

TEST_CASE("gauss curvature converges spectrally") {
    double e8 = conformal_error(8), e16 = conformal_error(16), e32 = conformal_error(32);
    CHECK(e16 < e8);
    // faster than any fixed power: the reduction factor itself grows
    CHECK(e8 / e16 > 16.0);
    CHECK(e32 < 1e-11);
}

TEST_CASE("angular calculus identities") {
    AngularGrid g = chart(32);
    const double w = 2 * pi / g.L1;
    SurfaceGeometry flatgeo(flat(g), g);
    Field f = sample(g, [&](double x, double) { return std::sin(w * x); });
    auto lap = calc::div(calc::grad(TensorField2::scalar(f), flatgeo), flatgeo);
    double err = 0;
    for (std::size_t p = 0; p < g.size(); ++p) err = std::max(err, std::abs(lap.comp[0][p] + w * w * f[p]));
    CHECK(err < 1e-10);

    TensorField2 gr = flat(g);
    Field r1 = random_smooth(g, 27), r2 = random_smooth(g, 28), r3 = random_smooth(g, 29);
    for (std::size_t p = 0; p < g.size(); ++p) {
        gr.comp[0][p] = 2 + 0.5 * r1[p];
        gr.comp[1][p] = gr.comp[2][p] = 0.2 * r2[p];
        gr.comp[3][p] = 2 + 0.5 * r3[p];
    }
    SurfaceGeometry geo(gr, g);
    auto s = TensorField2::scalar(random_smooth(g, 30));
    CHECK(max_abs(calc::curl(calc::grad(s, geo), geo).comp[0]) < 1e-10);

    auto phi = TensorField2::one_form(random_smooth(g, 31), random_smooth(g, 32));
    auto psi = TensorField2::one_form(random_smooth(g, 33), random_smooth(g, 34));
    CHECK(max_abs(calc::trace(calc::nabla_otimes(phi, geo), geo).comp[0]) < 1e-12);
    CHECK(max_abs(calc::trace(calc::hat_otimes(phi, psi, geo), geo).comp[0]) < 1e-12);

    auto hh = calc::hodge(calc::hodge(phi, geo), geo);
    CHECK(max_abs_diff(hh.comp[0], Field(phi.comp[0].size(), 0.0)) > 0.0);
    for (int A = 0; A < 2; ++A)
        for (std::size_t p = 0; p < g.size(); ++p) CHECK(hh.comp[A][p] == doctest::Approx(-phi.comp[A][p]).epsilon(1e-12));

    // phi ^ psi = (*phi) . psi up to sign convention: eps^{AB} phi_A psi_B = -(*phi).psi
    auto w1 = calc::wedge(phi, psi, geo);
    auto d1 = calc::dot(calc::hodge(phi, geo), psi, geo);
    for (std::size_t p = 0; p < g.size(); ++p) CHECK(w1.comp[0][p] == doctest::Approx(-d1.comp[0][p]).epsilon(1e-12));

    auto t = calc::tracefree(calc::hat_otimes(phi, phi, geo), geo);
    auto t2 = calc::tracefree(t, geo);
    for (int c = 0; c < 4; ++c) CHECK(max_abs_diff(t.comp[c], t2.comp[c]) < 1e-14);

    CHECK_THROWS_AS(calc::div(s, geo), UsageError);
    CHECK_THROWS_AS(calc::grad(phi, geo), UsageError);
    CHECK_THROWS_AS(angular_calculus("dot", phi, nullptr, geo), UsageError);
}

TEST_CASE("geometry operators are pure") {
    AngularGrid g = chart(32);
    Field a = random_smooth(g, 41);
    for (auto& v : a) v = 2.0 + 0.5 * v;
    TensorField2 gm = TensorField2::sym2(a, Field(g.size(), 0.1), Field(g.size(), 1.5));
    auto K1 = gauss_curvature(gm, g);
    auto K2 = gauss_curvature(gm, g);
    CHECK(K1.K == K2.K);
}
