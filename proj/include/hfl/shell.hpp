#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "hfl/grid.hpp"

namespace hfl::shell {

// Null dust shell at ubar = 0 entering the Minkowski cone region.
struct ShellSpacetime {
    AngularGrid chart;
    Field m;  // shell mass per angular point, m >= 0
    double ustar = 0.5;

    void validate() const;
};

ShellSpacetime make_shell(const AngularGrid& chart, const std::function<double(double, double)>& m, double ustar);

// (trchi^-, trchib) = (2, -2) / (ubar - u + 1) for 0 <= u < ubar + 1, ubar <= 0.
std::pair<double, double> cone_coefficients(double u, double ubar);

// trchi^+ = trchi^- - m / (1 - u)^2 at ubar = 0, written as (2 (1 - u) - m) / (1 - u)^2.
Field trch_jump(const ShellSpacetime& s, double u);

struct TrappedResult {
    std::vector<char> trapped;  // per point: trchi^+ < 0 and trchib < 0
    bool overall = false;
    double margin = 0.0;        // inf m - 2 (1 - ustar)
    double fraction = 0.0;
    Field trchi_plus;
    double trchib = 0.0;
};

TrappedResult is_trapped(const ShellSpacetime& s);

// Test function phi(u, ubar, point) with its partial derivatives.
struct ShellTestFn {
    std::function<double(double, double, std::size_t)> phi, d_ubar, d_u;
};

// Phi on the cone u = const: ubar + 1 - u before the shell, then the vacuum
// continuation (1 - u) + (1 - m / (2 (1 - u))) ubar with chi_hat = 0, Omega = 1.
double cone_phi(const ShellSpacetime& s, double u, double ubar, std::size_t p);
double cone_dphi(const ShellSpacetime& s, double u, double ubar, std::size_t p);

// LHS - RHS of the weak trchi identity on [ub1, ub2] at fixed u, with the
// measure m delta(ubar) dA included or dropped.
double weak_trch_residual(const ShellSpacetime& s, const ShellTestFn& phi, double u, double ub1, double ub2,
                          bool with_measure = true, std::size_t nquad = 2048);

// int phi dnu_{u2} - int phi dnu_{u1} - int int d_u phi dnu_u du with the shell at ubar0 and b = 0.
double dust_propagation_residual(const ShellSpacetime& s, const ShellTestFn& phi, double u1, double u2,
                                 double ubar0, std::size_t nquad = 1024);

// int phi m dA at ubar = 0.
double measure_pairing(const ShellSpacetime& s, const ShellTestFn& phi, double u, double ubar0 = 0.0);

// Shell mass recovered from the chi_hat energy gap of vacuum approximants:
// m = Phi(ubar0)^2 (mass_n - mass_background).
Field mass_from_energy_gap(const Field& mass_n, const Field& mass_background, const Field& Phi_at_shell);

}  // namespace hfl::shell
