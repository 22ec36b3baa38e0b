#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hfl/grid.hpp"
#include "hfl/tensor.hpp"
#include "hfl/tolerances.hpp"

namespace hfl::cons {

// Scalar coefficient evaluated at (ubar, angular index).
using PointFn = std::function<double(double, std::size_t)>;

struct Coefficients {
    PointFn omega;       // empty means 1
    PointFn dlog_omega;  // d(log Omega)/d ubar; empty means 0
    PointFn dgamma_sq;   // |d gamma_hat / d ubar|^2; empty means 0
};

struct Atom {
    double ubar = 0.0;
    Field mass;  // per angular index, >= 0
};

// Atoms plus an absolutely continuous density f (empty means none).
struct NullDustMeasure {
    std::vector<Atom> atoms;
    PointFn density;
    bool empty() const { return atoms.empty() && !density; }
};

void validate(const NullDustMeasure& nu, double a, double b);

struct Solution {
    std::vector<double> ubar;            // nodes; atom locations appear twice (left, right)
    std::vector<std::size_t> points;     // angular indices solved
    std::vector<Field> Phi, dPhi, ddPhi;  // [node][k], k indexes points
};

// Phi'' = 2 (log Omega)' Phi' - |d gamma_hat|^2 Phi / 8 - f / (2 Phi), RK4 between
// consecutive nodes, all angular points advanced together. Atoms must sit on
// nodes; across an atom Phi is continuous and Phi' jumps by -Omega^2 m / (2 Phi).
// Phi0, dPhi0 are indexed by angular index; `points` empty means all.
Solution solve_constraint(const Coefficients& c, const NullDustMeasure& nu, const std::vector<double>& nodes,
                          const Field& Phi0, const Field& dPhi0, std::vector<std::size_t> points = {});
Solution solve_vacuum_constraint(const Coefficients& c, const std::vector<double>& nodes, const Field& Phi0,
                                 const Field& dPhi0, std::vector<std::size_t> points = {});

// Test function phi(ubar) * angular[p], supported in [lo, hi].
struct TestFunction {
    std::function<double(double)> phi;
    std::function<double(double)> dphi;
    double lo = 0.0;
    double hi = 1.0;
    Field angular;  // empty means 1
};

// LHS - RHS of the weak constraint identity, integrated against area weights
// (cell area times sqrt det of the reference metric; empty means the flat cell area).
double weak_constraint_residual(const Solution& s, const Coefficients& c, const NullDustMeasure& nu,
                                const TestFunction& phi, const AngularGrid& chart, std::span<const double> area = {});

// (g^-1)^{AC} (g^-1)^{BD} dg_AB dg_CD.
double dgamma_sq(const Sym2& g, const Sym2& dg);
// Same on uniformly sampled slices, with d/d ubar by the 4th-order stencil.
std::vector<Field> dgamma_norm_sq(const std::vector<SymField>& gamma_hat, double h);

struct ChiData {
    std::vector<Field> trchi;
    std::vector<SymField> chihat;
    std::vector<Field> chihat_sq;  // |chi_hat|^2_gamma
    double identity_error = 0.0;   // max |trchi - 2 Phi' / (Omega Phi)|
};

// chi_AB = (2 Omega)^-1 d(Phi^2 gamma_hat_AB)/d ubar on uniform slices.
ChiData chi_from_data(double h, const std::vector<Field>& Omega, const std::vector<Field>& Phi,
                      const std::vector<Field>& dPhi, const std::vector<SymField>& gamma_hat);

double chihat_sq(const Sym2& gamma, const Sym2& chihat);

struct MassFunctional {
    Field per_point;
    double infimum = 0.0;
};

// int_{ubar_0}^{delta} |chi_hat|^2_gamma d ubar per angular point; delta must be a node.
MassFunctional christodoulou_mass(const std::vector<double>& ubar, const std::vector<Field>& chihat_sq, double delta);

}  // namespace hfl::cons
