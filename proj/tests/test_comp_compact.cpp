#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "hfl/comp_compact.hpp"
#include "hfl/error.hpp"
#include "hfl/functions.hpp"

using namespace hfl;
using namespace hfl::cc;

namespace {

Field noise(const Box& box, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    Field f(box.size());
    for (double& v : f) v = N(rng);
    return f;
}

double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

double max_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double psi(double u, double ub) { return std::exp(0.3 * std::sin(u + ub)) * (1.0 + 0.2 * std::cos(2.0 * u)); }

}  // namespace

TEST_CASE("Constant and single-frequency fields") {
    const Box b = box2(128);
    const Field c(b.size(), 3.5);
    auto d = decompose(c, b, 2.0);
    CHECK(max_diff(d.low, c) < 1e-14);
    CHECK(max_abs(d.h1) < 1e-14);
    CHECK(max_abs(d.h2) < 1e-14);

    const Field s = synthesize(b, {{{0, 40}, 1.0, -std::numbers::pi / 2}});
    for (Role role : {Role::F, Role::H}) {
        auto e = decompose(s, b, 2.0, role);
        CHECK(max_diff(e.h2, s) < 1e-13);
        CHECK(max_abs(e.low) < 1e-13);
        CHECK(max_abs(e.h1) < 1e-13);
    }
    const Field t = synthesize(b, {{{40, 0}, 1.0, 0.3}});
    for (Role role : {Role::F, Role::H}) {
        auto e = decompose(t, b, 2.0, role);
        CHECK(max_diff(e.h1, t) < 1e-13);
        CHECK(max_abs(e.h2) < 1e-13);
    }
}

TEST_CASE("Parseval and exact reconstruction") {
    for (const Box& b : {box2(64), box2(96), box4(16)}) {
        const Field f = noise(b, 7);
        auto [phys, spec] = parseval(f, b);
        CHECK(std::abs(phys - spec) <= 1e-12 * phys);
        for (double C1 : {1.2, 1.9})
            for (Role role : {Role::F, Role::H}) CHECK(decompose(f, b, C1, role).reconstruction_error(f) <= 1e-12);
    }
}

TEST_CASE("Multiplier masks") {
    const double C1 = 1.5;
    for (long a = -200; a <= 200; a += 3)
        for (long c = -200; c <= 200; c += 5) {
            const std::vector<long> xi{a, c};
            const auto f = masks(xi, C1, Role::F);
            const auto h = masks(xi, C1, Role::H);
            CHECK(std::abs(f[0] + f[1] + f[2] - 1.0) <= 1e-15);
            CHECK(std::abs(h[0] + h[1] + h[2] - 1.0) <= 1e-15);
            for (double m : {f[0], f[1], f[2], h[0], h[1], h[2]}) CHECK(m >= -1e-15);
            const double A = std::abs(double(a)), B = std::abs(double(c));
            if (50 * C1 * B > A) CHECK(f[1] == 0.0);
            if (50 * C1 * A > B) CHECK(h[2] == 0.0);
            CHECK(f[1] * h[2] == 0.0);
            if (std::hypot(A, B) >= 4 * C1) CHECK(f[0] == 0.0);
            if (std::hypot(A, B) <= 2 * C1) CHECK(f[0] == 1.0);
        }
    CHECK(masks({0, 50}, C1, Role::F)[1] == 0.0);
    CHECK(masks({50, 0}, C1, Role::H)[2] == 0.0);
    // The remainder pieces are not directional: the diagonal lands in F's H2 and H's H1.
    CHECK(masks({20, 20}, C1, Role::F)[2] == 1.0);
    CHECK(masks({20, 20}, C1, Role::H)[1] == 1.0);
}

TEST_CASE("Decomposition errors") {
    const Box b = box2(32);
    const Field f(b.size(), 1.0);
    CHECK_THROWS_AS(decompose(f, b, 1.0), UsageError);
    CHECK_THROWS_AS(decompose(f, b, 4.5), UsageError);
    CHECK_NOTHROW(decompose(f, b, 4.0));
    CHECK_THROWS_AS(decompose(Field(10, 0.0), b, 2.0), UsageError);
    CHECK_THROWS_AS(decompose(f, Box{{32, 32, 32}}, 2.0), UsageError);
    CHECK_THROWS_AS(decompose(Field(1, 0.0), box4(64), 2.0), UsageError);
}

TEST_CASE("Support of the H1 x H2 product") {
    const double C1 = 2.0;
    const Box b = box2(512);
    const long k = static_cast<long>(60 * C1);
    auto f = decompose(synthesize(b, {{{k, 1}, 1.0, 0.2}}), b, C1, Role::F);
    auto h = decompose(synthesize(b, {{{1, k}, 0.7, 1.1}}), b, C1, Role::H);
    // At |xi_1| = 60 C1 |xi_2| the directional cutoff is only partly open.
    const double open = fn::plateau(100.0 * C1 / static_cast<double>(k));
    CHECK(open > 0.1);
    CHECK(max_abs(f.h1) == doctest::Approx(open).epsilon(1e-4));
    CHECK(max_abs(h.h2) == doctest::Approx(0.7 * open).epsilon(1e-4));
    auto r = support_check(f, h);
    CHECK(r.ok);
    CHECK(r.margin == doctest::Approx(std::hypot(k - 1.0, k - 1.0)));

    auto z = decompose(Field(b.size(), 0.0), b, C1, Role::F);
    auto rz = support_check(z, h);
    CHECK(rz.ok);
    CHECK(rz.margin == std::numeric_limits<double>::infinity());
}

TEST_CASE("Randomized support property in 2D") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> U(1.05, 3.0);
    const Box b = box2(128);
    int violations = 0;
    double worst = 0.0, closest = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
        const double C1 = U(rng);
        auto f = decompose(noise(b, 1000 + trial), b, C1, Role::F);
        auto h = decompose(noise(b, 5000 + trial), b, C1, Role::H);
        auto r = support_check(f, h);
        if (!r.ok) ++violations;
        worst = std::max(worst, r.low_relative);
        closest = std::min(closest, r.margin / C1);
    }
    MESSAGE("worst low-frequency ratio " << worst << ", smallest margin / C1 " << closest);
    CHECK(violations == 0);
    CHECK(closest >= 1.0);
}

TEST_CASE("Support margin is invariant under translation and rescaling") {
    const double C1 = 1.5;
    const Box b = box2(256);
    const Field f = noise(b, 3), h = noise(b, 4);
    const auto base = support_check(decompose(f, b, C1, Role::F), decompose(h, b, C1, Role::H));
    const std::size_t n = 256, s1 = 17, s2 = 91;
    Field fs(f.size()), hs(h.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            fs[((i + s1) % n) * n + (j + s2) % n] = 2.5 * f[i * n + j];
            hs[((i + s1) % n) * n + (j + s2) % n] = -0.4 * h[i * n + j];
        }
    const auto moved = support_check(decompose(fs, b, C1, Role::F), decompose(hs, b, C1, Role::H));
    CHECK(moved.ok == base.ok);
    CHECK(moved.margin == base.margin);
}

TEST_CASE("Transverse frequencies in 4D defeat the support property") {
    const double C1 = 1.5;
    const Box b = box4(32);
    auto f = decompose(synthesize(b, {{{1, 0, 10, 0}, 1.0, 0.0}}), b, C1, Role::F);
    auto h = decompose(synthesize(b, {{{0, 1, -10, 0}, 1.0, 0.0}}), b, C1, Role::H);
    CHECK(max_abs(f.h1) > 0.99);
    CHECK(max_abs(h.h2) > 0.99);
    auto r = support_check(f, h);
    CHECK_FALSE(r.ok);
    CHECK(r.margin == doctest::Approx(std::sqrt(2.0)));

    // Without transverse frequencies the 4D box behaves like the 2D one.
    auto f2 = decompose(synthesize(b, {{{12, 0, 0, 0}, 1.0, 0.0}}), b, C1, Role::F);
    auto h2 = decompose(synthesize(b, {{{0, 12, 0, 0}, 1.0, 0.0}}), b, C1, Role::H);
    CHECK(support_check(f2, h2).ok);
}

TEST_CASE("Weak products of oscillatory pairs") {
    const std::vector<int> ns{16, 32, 64, 128, 256};
    auto t = weak_product_test(named_pair("transverse"), psi, ns, 1024);
    for (const auto& w : t.rows) MESSAGE("transverse n=" << w.n << " gap " << w.gap);
    CHECK(t.transverse);
    CHECK(t.bounds_ok);
    CHECK(t.verdict);
    CHECK(std::abs(t.rows.back().gap) <= 1e-3);
    CHECK(t.limit == 0.0);

    auto s = weak_product_test(named_pair("sin2"), psi, ns, 1024);
    CHECK_FALSE(s.transverse);
    CHECK(s.bounds_ok);
    CHECK_FALSE(s.verdict);
    for (const auto& w : s.rows) CHECK(std::abs(w.pairing / s.psi_mean - 0.5) <= 1e-6);
    CHECK(s.extrapolated / s.psi_mean == doctest::Approx(0.5).epsilon(1e-6));

    auto g = weak_product_test(named_pair("strong-weak"), psi, ns, 1024);
    CHECK(g.transverse);
    CHECK(g.bounds_ok);
    CHECK(g.verdict);
    CHECK(std::abs(g.limit) > 0.1);

    // The transverse pair's h_n has unbounded d/du: declaring it bounded is caught.
    auto bad = named_pair("transverse");
    bad.h_bounded = {0, 1};
    CHECK_FALSE(weak_product_test(bad, psi, ns, 1024).bounds_ok);

    CHECK_THROWS_AS(weak_product_test(named_pair("transverse"), psi, ns, 512), UsageError);
    CHECK_THROWS_AS(named_pair("nope"), UsageError);
}
