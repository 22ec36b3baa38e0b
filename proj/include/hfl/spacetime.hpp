#pragma once

#include <array>
#include <string>

#include "hfl/grid.hpp"

namespace hfl {

// Four-metric whose components depend on at most two coordinates.
// Samples are row-major over (axis0, axis1): index i0 * n1 + i1.
struct MetricBlock {
    std::array<std::string, 4> labels{"x0", "x1", "x2", "x3"};
    int nactive = 2;
    std::array<int, 2> active{0, 1};  // coordinate index carried by each axis
    Grid1D axis0{0.0, 1.0, 5};
    Grid1D axis1{0.0, 1.0, 5};
    bool diagonal = false;
    std::array<std::array<Field, 4>, 4> g;  // g[mu][nu], symmetric

    std::size_t n0() const { return axis0.n; }
    std::size_t n1() const { return nactive == 2 ? axis1.n : 1; }
    std::size_t size() const { return n0() * n1(); }
    void allocate();
    void set(int mu, int nu, std::size_t p, double v) {
        g[mu][nu][p] = v;
        g[nu][mu][p] = v;
    }
};

struct RicciResult {
    MetricBlock ric;              // Ricci components on the same samples
    Field scalar;                 // Ricci scalar
    std::size_t margin = 4;       // samples from each edge excluded as boundary
    double max_interior = 0.0;    // max |Ric_{mu nu}| over interior samples
    double resolution_indicator = 0.0;
    bool underresolved = false;   // warning: fastest oscillation below ~16 points per wavelength
};

// Ricci tensor by 4th-order finite differences (one-sided closures at the
// ends). Throws if the metric is not Lorentzian at some sample.
RicciResult spacetime_ricci(const MetricBlock& m);

// G = Ric - R g / 2.
MetricBlock einstein_tensor(const MetricBlock& m, const RicciResult& r);

bool interior(const MetricBlock& m, std::size_t p, std::size_t margin);

}  // namespace hfl
