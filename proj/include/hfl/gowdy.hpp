#pragma once

#include <vector>

#include "hfl/grid.hpp"
#include "hfl/spacetime.hpp"

namespace hfl::gowdy {

// J_order(x) for order 0, 1, 2 and x >= 0.
double bessel_j(int order, double x);

struct Family {
    Grid1D tau;
    Grid1D theta;
    Field P;      // index i_tau * theta.n + i_theta
    Field alpha;
};

// Samples P_n and alpha_n. Throws UsageError when either axis has fewer than
// 16 samples per oscillation.
Family eval_family(int n, double A, const Grid1D& tau, const Grid1D& theta);
double alpha_at(int n, double A, double tau, double theta);
double P_at(int n, double A, double tau, double theta);

// sup over theta of |alpha_n + A^2 e^{-tau} / pi| at fixed tau (closed form in theta).
double alpha_gap_sup_theta(int n, double A, double tau);
// sup of the same over tau in [t0, t1], sampled at 16 points per oscillation.
double alpha_gap_sup(int n, double A, double t0, double t1);

// The 4-metric g_n on (tau, theta, sigma, delta).
MetricBlock metric_block(int n, double A, const Grid1D& tau, const Grid1D& theta);
MetricBlock limit_block(double A, const Grid1D& tau, const Grid1D& theta);

struct VacuumResidual {
    double residual = 0.0;       // max |Ric| on the window at the given grid
    double residual_fine = 0.0;  // same at half spacing
    double order = 0.0;          // log2(residual / residual_fine)
    double richardson = 0.0;     // residual_fine / (2^4 - 1)
    bool underresolved = false;
};

// Max |Ric(g_n)| over the window [tau.a + w, tau.b - w] x [theta.a + w', theta.b - w'],
// w = 4 coarse spacings, at the given grid and at half spacing.
VacuumResidual vacuum_residual(int n, double A, const Grid1D& tau, const Grid1D& theta);

struct LimitEinstein {
    double G_tautau = 0.0;
    double G_thetatheta = 0.0;
    double max_other = 0.0;     // largest other component
    double target_tautau = 0.0;
    double target_thetatheta = 0.0;
    // Null components in (u, ubar) with ubar = -e^{-tau} + theta, u = -e^{-tau} - theta.
    double G_uu = 0.0;
    double G_ubub = 0.0;
    double G_uub = 0.0;
};

LimitEinstein limit_einstein(double A, double tau);

// sup |g_n - g_inf| over the window, all components.
double metric_gap(int n, double A, const Grid1D& tau, const Grid1D& theta);

}  // namespace hfl::gowdy
