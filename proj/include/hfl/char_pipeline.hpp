#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hfl/geometry.hpp"
#include "hfl/grid.hpp"
#include "hfl/hf_approx.hpp"
#include "hfl/tensor.hpp"

namespace hfl::cp {

// Reduced data (Omega, Phi, gamma_hat) on uniform ubar slices of H_0, slice i
// at ubar = i h.
struct ReducedCharData {
    AngularGrid chart;
    double h = 0.0;
    std::vector<Field> Omega, Phi, dPhi;
    std::vector<SymField> gamma_hat;
    std::vector<SymField> dgamma_hat;  // closed-form d gamma_hat / d ubar; empty means fd4
    std::vector<Field> dlog_omega;     // closed-form d log Omega / d ubar; empty means fd4
    double K_ref = 0.0;                // K_ref / Phi^2 is added to the Gauss curvature of gamma

    std::size_t slices() const { return Omega.size(); }
    double ubar(std::size_t i) const { return h * static_cast<double>(i); }
    TensorField2 gamma(std::size_t i) const;
    void validate() const;
};

// Samples (Omega, Phi, gamma_hat) from callbacks on n slices over [0, ubar_max].
// phi(u, p) returns (Phi, d Phi / d ubar); omega returns (Omega, d log Omega / d ubar).
using PairFn = std::function<std::pair<double, double>(double, std::size_t)>;
ReducedCharData sample_data(const AngularGrid& chart, std::size_t n, double ubar_max, const PairFn& omega,
                            const PairFn& phi, const hf::SymFn& gamma_hat, const hf::SymFn& dgamma_hat = {});

// Slices of an oscillatory family with Phi_n from its Hermite track.
ReducedCharData data_from_family(const hf::OscillatoryFamily& fam, const hf::Background& bg, std::size_t n,
                                 double ubar_max);

struct Outgoing {
    std::vector<TensorField2> chi, chihat;  // symmetric covariant
    std::vector<Field> trchi, omega;
    std::vector<Field> omega_text;          // -2 Omega^-1 d log Omega, reported only
    double identity_error = 0.0;           // max |trchi - 2 Phi' / (Omega Phi)|
};

// omega = -1/2 Omega^-1 d log Omega; chi = (2 Omega)^-1 d (Phi^2 gamma_hat).
Outgoing derive_outgoing(const ReducedCharData& data);

// Values on S_00: d b / d ubar and the transversal quantities.
struct CornerData {
    Field dub1, dub2;
    Field omegab, trchib;
    SymField chibhat;
};

CornerData minkowski_corner(const AngularGrid& chart);

struct RicciCoefficients {
    std::vector<std::size_t> slice;  // data slice index of each output
    std::vector<double> ubar;
    std::vector<Field> trchi, trchib, omega, omegab, K;
    std::vector<TensorField2> chihat, chibhat, eta, etab, b;
    double relation_error = 0.0;  // max |1/2 (eta + etab) - grad log Omega|
};

struct TransportOptions {
    double bound = 1e8;
};

// RK4 of step 2h over (eta, b, omegab, trchib, chibhat); stages sit on data
// slices, outputs on even slices. Needs an odd slice count >= 5.
RicciCoefficients solve_transport_system(const ReducedCharData& data, const Outgoing& out, const CornerData& corner,
                                         const TransportOptions& opt = {});

struct ResidualReport {
    std::vector<std::pair<std::string, double>> max;  // per equation, sup norm
    double omega_max = 0.0;                           // sup |omega|
    double omega_text_max = 0.0;                      // sup |-2 Omega^-1 d log Omega|
    double value(const std::string& name) const;
};

// LHS - RHS of the H_0 equations with fd4 along the output slices.
// chihat_shift is added to chi_hat in the Ric44 residual only.
ResidualReport structure_residuals(const RicciCoefficients& c, const ReducedCharData& data, const Outgoing& out,
                                   const TensorField2* chihat_shift = nullptr);

// log2(coarse / fine) per equation.
std::vector<std::pair<std::string, double>> residual_orders(const ResidualReport& coarse, const ResidualReport& fine);

struct RenormalizedCurvature {
    TensorField2 beta, betab;
    Field sigma, mu, mub;
};

RenormalizedCurvature renormalized_curvature(const RicciCoefficients& c, std::size_t j, const SurfaceGeometry& geo);

}  // namespace hfl::cp
