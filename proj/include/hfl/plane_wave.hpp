#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hfl/grid.hpp"
#include "hfl/rate_fit.hpp"

namespace hfl::pw {

using Fn = std::function<double(double)>;

// Seed profile k with its first derivative, supported in [lo, hi].
struct Seed {
    std::string name;
    Fn k;
    Fn dk;
    double lo = -0.5;
    double hi = 0.5;
};

// Named seeds: "cosine" (1 + cos(2 pi s)/2 on [0, 1/2]), "bump" and "poly"
// (compact on [-1/2, 1/2]).
Seed make_seed(const std::string& name);
// k <- k / sqrt(int (k')^2).
Seed normalize_shell_seed(const Seed& k);
double seed_energy(const Seed& k);

// G and G' as functions of ubar.
struct Profile {
    Fn G;
    Fn dG;
    double lambda = 0.0;
};

Profile burnett_profile(double lambda, const Seed& k);
// sqrt(lambda) k((ubar - offset) / lambda).
Profile shell_profile(double lambda, const Seed& k, double offset = 0.0);

Field make_burnett_G(double lambda, const Seed& k, const Grid1D& grid);
// Throws UsageError when fewer than 32 samples fall across the support.
Field make_shell_G(double lambda, const Seed& k, const Grid1D& grid, double offset = 0.0);

struct HSolution {
    std::vector<double> x;
    Field H;
    Field dH;
    Field ddH;  // from the ODE right side
    double richardson = 0.0;  // max |H_h - H_{h/2}| / 15 when requested
};

// H'' = -(G')^2 H / 4 with H = 1, H' = 0 at nodes.front(), by RK4 between
// consecutive nodes. Throws NumericalError at the first node where H <= 0.
HSolution solve_H(const Fn& dG, const std::vector<double>& nodes, bool richardson = false);
// Sampled G: G' by the 4th-order stencil, RK4 steps of 2h whose stages sit
// on the samples. Output on even samples.
HSolution solve_H(const Field& G, const Grid1D& grid);
// The averaged Burnett limit H0'' = -(k^2 / 8) H0.
HSolution solve_H_averaged(const Seed& k, const std::vector<double>& nodes);

// Uniform nodes with a finer step inside [c - w, c + w].
std::vector<double> pulse_nodes(double a, double b, double c, double w, double step_in, double step_out);
std::vector<double> uniform_nodes(double a, double b, std::size_t intervals);

// -(G')^2 / 2 - 2 H'' / H.
Field ricci_uu(const Field& dG, const Field& H, const Field& ddH);
// Same with G' and H'' from stencils on uniform samples.
Field ricci_uu_stencil(const Field& G, const Field& H, double h);

struct WeakLimit {
    std::vector<double> lambdas;
    std::vector<double> pairings;
    double limit = 0.0;  // oracle limit supplied by the caller
    std::vector<double> gaps;
    std::optional<RateFit> fit;
};

// int (G_lambda')^2 phi d ubar for each lambda on [a, b] (composite Simpson,
// at least `per_scale` points per lambda).
WeakLimit weak_limit_measure(const std::function<Profile(double)>& family, const Fn& phi, double a, double b,
                             const std::vector<double>& lambdas, double limit, int per_scale = 512);

struct Jump {
    double location = 0.0;
    double magnitude = 0.0;
};

// Jump of H' across the largest |H''|: H'(loc + window) - H'(loc - window).
std::optional<Jump> jump_detect(const HSolution& s, double window);

}  // namespace hfl::pw
