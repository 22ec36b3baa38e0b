#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hfl/constraints.hpp"
#include "hfl/grid.hpp"
#include "hfl/rate_fit.hpp"
#include "hfl/tensor.hpp"

namespace hfl::hf {

using cons::PointFn;
using SymFn = std::function<Sym2(double, std::size_t)>;

// Cubic Hermite reconstruction of a constraint solution between nodes.
class SolutionTrack {
public:
    explicit SolutionTrack(std::shared_ptr<const cons::Solution> s);
    double value(double u, std::size_t p) const;
    double slope(double u, std::size_t p) const;

private:
    std::size_t interval(double u) const;
    std::shared_ptr<const cons::Solution> s_;
    std::vector<long> slot_;
};

// Smooth dust data (gamma_hat, f, Phi) with the ubar derivatives the
// oscillation construction needs.
struct DustData {
    SymFn gamma, dgamma, ddgamma;
    PointFn sqrt_f, dsqrt_f;  // f^{1/2}; empty means f = 0
    PointFn Phi, dPhi;
    std::string provenance;
};

double min_eigenvalue(const Sym2& g);

struct OscillatoryFamily {
    int n = 1;
    double k = 1.0;
    DustData dust;
    cons::Solution Phi;  // Phi_n once solved

    Sym2 gamma(double u, std::size_t p) const;
    Sym2 dgamma(double u, std::size_t p) const;
    double dgamma_sq(double u, std::size_t p) const;
    double F(double u, std::size_t p) const;
    double dF(double u, std::size_t p) const;
    // s = (2 f^{1/2} / Phi) sin(k n u) / (k n) and d s / d u.
    std::pair<double, double> amplitude(double u, std::size_t p) const;
};

// k = 8 (sup f^{1/2}/Phi + 1) / min eig, doubled until min eig gamma_n >=
// (1/2) min eig gamma_dust on all samples for every n >= n_min.
double choose_k(const DustData& d, const std::vector<double>& nodes, std::size_t npoints, int n_min = 1);

OscillatoryFamily build_gamma_n(const DustData& d, double k, int n);

// Sup over nodes and points of the weak defect; with_corrector = false drops
// the (1/n) dF_n term. Throws NumericalError when nodes under-resolve 2kn.
double weak_defect_residual(const OscillatoryFamily& fam, const std::vector<double>& nodes, std::size_t npoints,
                            bool with_corrector = true);
void require_resolved(const OscillatoryFamily& fam, const std::vector<double>& nodes, std::size_t npoints,
                      double per_period = 16.0);

// Phi_n from the vacuum constraint with |d gamma_n|^2; stores it in fam.Phi.
const cons::Solution& solve_phi_n(OscillatoryFamily& fam, const cons::Coefficients& omega,
                                  const std::vector<double>& nodes, const Field& Phi0, const Field& dPhi0);

// Step h_out outside [lo, hi], h_in inside; breakpoints included.
std::vector<double> window_nodes(double a, double b, double lo, double hi, double h_in, double h_out);

// Smooth partition of [0, ustar] with supports [0, u/3], [u/4, 3u/4], [2u/3, u].
double zeta(int i, double u, double ustar);
double dzeta(int i, double u, double ustar);

struct Mollified {
    int m = 1;
    double eps = 0.25;
    double ustar = 1.0;
    PointFn f, df;                                    // density f_m and d/d ubar
    PointFn sqrt_f, dsqrt_f;                          // f_m^{1/2}
    std::vector<std::pair<double, double>> windows;  // ubar intervals containing supp f_m
};

// f_m from the three shifted mollifications with eps = 2^{-2m}.
Mollified mollify_measure(const cons::NullDustMeasure& nu, const cons::Coefficients& omega, double ustar, int m);

// Omega^-2 f_m paired with phi, and the same for nu.
double pairing(const Mollified& f, const cons::Coefficients& omega, const cons::TestFunction& phi,
               const AngularGrid& chart);
double pairing(const cons::NullDustMeasure& nu, const cons::Coefficients& omega, const cons::TestFunction& phi,
               const AngularGrid& chart, double ustar);

// Nodes with step eps/64 on each window and h_out elsewhere; atoms land on nodes.
std::vector<double> mollifier_nodes(const Mollified& f, const cons::NullDustMeasure& nu, double h_out);

cons::Solution solve_phi_m_dust(const Mollified& f, const cons::Coefficients& c, const std::vector<double>& nodes,
                                const Field& Phi0, const Field& dPhi0);

struct PhiGap {
    double sup = 0.0;          // sup |Phi_m - Phi|
    double l2_slope = 0.0;     // || sup_theta |d(Phi_m - Phi)| ||_{L^2}
    double sup_slope = 0.0;    // sup |d(Phi_m - Phi)|
    double min_ratio = 0.0;    // min over points with a jump of sup_slope / |jump|
};

// Compares a smooth solve with the glued atom solve on matching nodes.
PhiGap phi_gap(const cons::Solution& smooth, const cons::Solution& glued, const cons::NullDustMeasure& nu);

struct Background {
    SymFn gamma, dgamma, ddgamma;
    cons::Coefficients omega;  // omega and dlog_omega; dgamma_sq is filled in
    AngularGrid chart;
    double ustar = 1.0;
    Field Phi0, dPhi0;
};

struct PipelineStage {
    int m = 1;
    int n = 1;
    double k = 1.0;
    Mollified f;
    std::vector<double> nodes;
    std::shared_ptr<const cons::Solution> dust;
    OscillatoryFamily family;  // vacuum, Phi_n in family.Phi
};

// Mollify, solve the dust constraint, oscillate, and solve the vacuum constraint.
PipelineStage approx_pipeline(const cons::NullDustMeasure& nu, const Background& bg, int m, double n_scale = 1.0);

struct WeakRow {
    int m = 0;
    std::size_t phi = 0;
    double lhs = 0.0;
    double pairing = 0.0;
    double gap = 0.0;
};

struct WeakCheck {
    std::vector<WeakRow> rows;
    std::vector<std::optional<RateFit>> fits;  // per phi, |gap| against 2^{-m}
};

std::vector<WeakRow> stage_pairings(const PipelineStage& st, const cons::NullDustMeasure& nu, const Background& bg,
                                    const std::vector<cons::TestFunction>& phis);
WeakCheck fit_weak_rows(std::vector<WeakRow> rows, std::size_t nphi);

// 1/4 int phi Omega^-2 (|d gamma_m|^2 Phi_m^2 - |d gamma|^2 Phi^2) against int phi d nu.
WeakCheck pipeline_weak_check(const std::vector<PipelineStage>& stages, const cons::NullDustMeasure& nu,
                              const Background& bg, const std::vector<cons::TestFunction>& phis);

// int_0^delta |chi_hat|^2 = 1/4 Omega^-2 |d gamma_n|^2 on the stage nodes.
cons::MassFunctional pipeline_mass(const PipelineStage& st, const Background& bg, double delta);

}  // namespace hfl::hf
