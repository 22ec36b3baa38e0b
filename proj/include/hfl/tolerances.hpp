#pragma once

namespace hfl {

// All numerical tolerances in one place.
struct Tolerances {
    double ode_step = 1e-10;
    double quadrature = 1e-9;
    double fft_identity = 1e-12;
    double rate_fraction = 0.9;    // accepted fraction of the theoretical rate
    double det_relative = 1e-12;
    double gauss_crosscheck = 1e-6;
    double trace_identity = 1e-6;
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

}  // namespace hfl
