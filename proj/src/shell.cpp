#include "hfl/shell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hfl/error.hpp"

namespace hfl::shell {

void ShellSpacetime::validate() const {
    if (!(ustar > 0.0 && ustar < 1.0)) throw UsageError("shell: ustar must lie in (0, 1)");
    if (m.size() != chart.size()) throw UsageError("shell: mass field does not match the chart");
    for (std::size_t p = 0; p < m.size(); ++p)
        if (!(m[p] >= 0.0) || !std::isfinite(m[p])) {
            std::ostringstream os;
            os << "shell: mass must be finite and non-negative (point " << p << ")";
            throw UsageError(os.str());
        }
}

ShellSpacetime make_shell(const AngularGrid& chart, const std::function<double(double, double)>& m, double ustar) {
    ShellSpacetime s{chart, sample(chart, m), ustar};
    s.validate();
    return s;
}

std::pair<double, double> cone_coefficients(double u, double ubar) {
    if (!(u >= 0.0) || !(ubar <= 0.0) || !(u < ubar + 1.0)) {
        std::ostringstream os;
        os << "cone_coefficients: (u, ubar) = (" << u << ", " << ubar << ") outside 0 <= u < ubar + 1, ubar <= 0";
        throw UsageError(os.str());
    }
    const double r = ubar - u + 1.0;
    return {2.0 / r, -2.0 / r};
}

Field trch_jump(const ShellSpacetime& s, double u) {
    s.validate();
    if (!(u >= 0.0 && u < 1.0)) throw UsageError("trch_jump: u must lie in [0, 1)");
    const double r = 1.0 - u;
    Field out(s.m.size());
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = (2.0 * r - s.m[p]) / (r * r);
    return out;
}

TrappedResult is_trapped(const ShellSpacetime& s) {
    TrappedResult t;
    t.trchi_plus = trch_jump(s, s.ustar);
    t.trchib = cone_coefficients(s.ustar, 0.0).second;
    t.trapped.resize(s.m.size());
    double inf = std::numeric_limits<double>::infinity();
    std::size_t count = 0;
    for (std::size_t p = 0; p < s.m.size(); ++p) {
        t.trapped[p] = t.trchi_plus[p] < 0.0 && t.trchib < 0.0;
        count += t.trapped[p] ? 1 : 0;
        inf = std::min(inf, s.m[p]);
    }
    t.margin = inf - 2.0 * (1.0 - s.ustar);
    t.fraction = s.m.empty() ? 0.0 : static_cast<double>(count) / static_cast<double>(s.m.size());
    t.overall = !s.m.empty() && count == s.m.size();
    return t;
}

double cone_phi(const ShellSpacetime& s, double u, double ubar, std::size_t p) {
    const double r = 1.0 - u;
    if (ubar <= 0.0) return ubar + r;
    return r + (1.0 - s.m[p] / (2.0 * r)) * ubar;
}

double cone_dphi(const ShellSpacetime& s, double u, double ubar, std::size_t p) {
    const double r = 1.0 - u;
    if (ubar < 0.0) return 1.0;
    return 1.0 - s.m[p] / (2.0 * r);
}

namespace {

std::vector<double> simpson_weights(std::size_t n, double h) {
    std::vector<double> w(n + 1);
    for (std::size_t i = 0; i <= n; ++i) w[i] = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    for (double& x : w) x *= h / 3.0;
    return w;
}

}  // namespace

double weak_trch_residual(const ShellSpacetime& s, const ShellTestFn& f, double u, double ub1, double ub2,
                          bool with_measure, std::size_t nquad) {
    s.validate();
    if (!(ub1 < 0.0 && ub2 > 0.0)) throw UsageError("weak_trch_residual: need ub1 < 0 < ub2");
    if (!(u >= 0.0 && u < 1.0 + ub1)) throw UsageError("weak_trch_residual: (u, ub1) outside the cone region");
    const std::size_t P = s.chart.size();
    for (std::size_t p = 0; p < P; ++p)
        if (!(cone_phi(s, u, ub2, p) > 0.0))
            throw UsageError("weak_trch_residual: exterior Phi reaches zero before ub2");
    const double dA = s.chart.cell_area();
    const std::size_t n = nquad + nquad % 2;
    // Phi^2 trchi = 2 Phi Phi', with one-sided Phi' at the shell.
    auto dphi = [&](double ub, std::size_t p, bool right) { return right ? cone_dphi(s, u, ub, p) : 1.0; };
    auto flux = [&](double ub, std::size_t p, bool right) {
        return f.phi(u, ub, p) * 2.0 * cone_phi(s, u, ub, p) * dphi(ub, p, right);
    };
    auto bulk = [&](double a, double b, std::size_t p, bool right) {
        const auto w = simpson_weights(n, (b - a) / static_cast<double>(n));
        double sum = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            const double ub = i == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
            const double F = cone_phi(s, u, ub, p), tr = 2.0 * dphi(ub, p, right) / F;
            sum += w[i] * (f.d_ubar(u, ub, p) * tr + 0.5 * f.phi(u, ub, p) * tr * tr) * F * F;
        }
        return sum;
    };
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
        lhs += dA * (flux(ub2, p, true) - flux(ub1, p, false));
        rhs += dA * (bulk(ub1, 0.0, p, false) + bulk(0.0, ub2, p, true));
        if (with_measure) rhs -= dA * f.phi(u, 0.0, p) * s.m[p];
    }
    return lhs - rhs;
}

double dust_propagation_residual(const ShellSpacetime& s, const ShellTestFn& f, double u1, double u2, double ubar0,
                                 std::size_t nquad) {
    s.validate();
    if (!(u1 < u2)) throw UsageError("dust_propagation_residual: need u1 < u2");
    const std::size_t n = nquad + nquad % 2;
    const auto w = simpson_weights(n, (u2 - u1) / static_cast<double>(n));
    const double h = (u2 - u1) / static_cast<double>(n);
    const double dA = s.chart.cell_area();
    double r = 0.0;
    for (std::size_t p = 0; p < s.chart.size(); ++p) {
        if (s.m[p] == 0.0) continue;
        double integral = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double u = i + 1 == w.size() ? u2 : u1 + h * static_cast<double>(i);
            integral += w[i] * f.d_u(u, ubar0, p);
        }
        r += dA * s.m[p] * (f.phi(u2, ubar0, p) - f.phi(u1, ubar0, p) - integral);
    }
    return r;
}

double measure_pairing(const ShellSpacetime& s, const ShellTestFn& f, double u, double ubar0) {
    double r = 0.0;
    for (std::size_t p = 0; p < s.chart.size(); ++p) r += s.chart.cell_area() * f.phi(u, ubar0, p) * s.m[p];
    return r;
}

Field mass_from_energy_gap(const Field& mass_n, const Field& mass_background, const Field& Phi_at_shell) {
    if (mass_n.size() != mass_background.size() || mass_n.size() != Phi_at_shell.size())
        throw UsageError("mass_from_energy_gap: size mismatch");
    Field m(mass_n.size());
    for (std::size_t p = 0; p < m.size(); ++p)
        m[p] = Phi_at_shell[p] * Phi_at_shell[p] * (mass_n[p] - mass_background[p]);
    return m;
}

}  // namespace hfl::shell
