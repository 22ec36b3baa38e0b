#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "hfl/grid.hpp"
#include "hfl/spectral.hpp"

namespace hfl::cc {

// Periodic box [0, 2 pi)^d, d = 2 (u, ubar) or 4 (u, ubar, x3, x4); axis 0 = u
// pairs with xi_1 and axis 1 = ubar with xi_2.
struct Box {
    std::vector<int> dims;

    std::size_t size() const;
    double coord(std::size_t axis, std::size_t index) const;
    // Multi-index of flat point p (row-major).
    std::vector<std::size_t> point(std::size_t p) const;
    void validate() const;
};

Box box2(int n);
Box box4(int n);

// Which high-frequency piece carries the explicit directional mask:
// F: H1 = (1 - chi(|xi| / 2C1)) chi(100 C1 |xi_2| / |xi_1|), H2 the remainder;
// H: H2 = (1 - chi(|xi| / 2C1)) chi(100 C1 |xi_1| / |xi_2|), H1 the remainder.
enum class Role { F, H };

// Multipliers (low, H1, H2) at a lattice frequency; they sum to 1.
std::array<double, 3> masks(const std::vector<long>& xi, double C1, Role role);

struct FrequencyDecomposition {
    Box box;
    double C1 = 2.0;
    Role role = Role::F;
    Field low, h1, h2;
    std::vector<double> mask_low, mask_h1, mask_h2;  // per complex slot

    // max |f - low - h1 - h2|
    double reconstruction_error(const Field& f) const;
};

FrequencyDecomposition decompose(const Field& f, const Box& box, double C1, Role role = Role::F);

// sum |f|^2 / N against sum |f_hat|^2 / N^2 over the full lattice.
std::pair<double, double> parseval(const Field& f, const Box& box);

struct SupportReport {
    bool ok = true;
    double margin = 0.0;        // min |xi| with |F(f_H1 h_H2)| above threshold
    double low_relative = 0.0;  // max over |xi| < C1 relative to the peak
};

// F(d1.h1 * d2.h2) on |xi| < C1 relative to its peak, threshold 1e-10.
SupportReport support_check(const FrequencyDecomposition& d1, const FrequencyDecomposition& d2,
                            double threshold = 1e-10);

// Real field with prescribed amplitudes at lattice frequencies (and their mirrors).
struct Mode {
    std::vector<long> xi;
    double amplitude = 1.0;
    double phase = 0.0;
};
Field synthesize(const Box& box, const std::vector<Mode>& modes);

// Closed-form oscillatory families on the 2D box.
using Gen = std::function<double(int n, double u, double ubar)>;
using Fn2 = std::function<double(double u, double ubar)>;

struct SequencePair {
    std::string name;
    Gen f, h;
    Fn2 f_inf, h_inf;
    // Axes along which the derivative of each member stays uniformly bounded.
    std::vector<int> f_bounded, h_bounded;

    // Some bounded axis of f differs from some bounded axis of h.
    bool transverse() const;
};

// "transverse", "sin2", "strong-weak".
SequencePair named_pair(const std::string& name);
std::vector<std::string> pair_names();

struct PairingRow {
    int n = 0;
    double pairing = 0.0;
    double gap = 0.0;
    double f_bound = 0.0;  // max L2 norm of the declared bounded derivatives of f_n
    double h_bound = 0.0;
};

struct WeakProductResult {
    std::string pair;
    std::vector<PairingRow> rows;
    double limit = 0.0;       // mean of f_inf h_inf psi
    double extrapolated = 0.0;
    double psi_mean = 0.0;
    bool bounds_ok = true;   // declared bounds hold: last / first norm <= 2
    bool transverse = true;
    bool verdict = false;
    double tolerance = 1e-3;
};

// Box means (1 / 4 pi^2) int f_n h_n psi on an N x N grid, N >= 4 max n.
WeakProductResult weak_product_test(const SequencePair& pair, const Fn2& psi, const std::vector<int>& ns,
                                    int grid, double tolerance = 1e-3);

}  // namespace hfl::cc
