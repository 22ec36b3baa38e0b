#pragma once

#include <array>
#include <string>

#include "hfl/grid.hpp"
#include "hfl/spectral.hpp"
#include "hfl/tensor.hpp"

namespace hfl {

// Christoffel symbols Gamma^C_AB of a metric on the chart, as a (1,2) field.
TensorField2 christoffel(const TensorField2& gamma, const AngularGrid& chart);

struct GaussResult {
    Field K;
    double crosscheck = 0.0;  // max |R_22 - K gamma_22|
};

// Gauss curvature from R_11 / gamma_11, cross-checked with R_22 / gamma_22.
GaussResult gauss_curvature(const TensorField2& gamma, const AngularGrid& chart, double tol = 1e-6);

// Metric data needed by the angular calculus, computed once per slice.
class SurfaceGeometry {
public:
    SurfaceGeometry(const TensorField2& gamma, const AngularGrid& chart);
    const AngularGrid& chart() const { return chart_; }
    const Spectral2D& spectral() const { return *sp_; }
    std::size_t size() const { return chart_.size(); }
    const TensorField2& metric() const { return g_; }
    const TensorField2& gamma_symbols() const { return G_; }
    // Inverse metric components and 1/sqrt(det).
    const Field& inv(int A, int B) const { return inv_[A + B]; }
    const Field& sqrt_det() const { return sqrtdet_; }
    double eps_up(std::size_t p) const { return 1.0 / sqrtdet_[p]; }  // eps^{12}
    const Field& area_density() const { return sqrtdet_; }

private:
    AngularGrid chart_;
    const Spectral2D* sp_;
    TensorField2 g_;
    std::array<Field, 3> inv_;  // 11, 12, 22
    Field sqrtdet_;
    TensorField2 G_;
};

namespace calc {
TensorField2 grad(const TensorField2& f, const SurfaceGeometry& geo);
TensorField2 covariant(const TensorField2& phi, const SurfaceGeometry& geo);
TensorField2 div(const TensorField2& phi, const SurfaceGeometry& geo);
TensorField2 curl(const TensorField2& phi, const SurfaceGeometry& geo);
TensorField2 nabla_otimes(const TensorField2& phi, const SurfaceGeometry& geo);
TensorField2 trace(const TensorField2& phi, const SurfaceGeometry& geo);
TensorField2 tracefree(const TensorField2& phi, const SurfaceGeometry& geo);
TensorField2 hodge(const TensorField2& phi, const SurfaceGeometry& geo);
TensorField2 raise(const TensorField2& phi, const SurfaceGeometry& geo);
TensorField2 dot(const TensorField2& phi, const TensorField2& psi, const SurfaceGeometry& geo);
TensorField2 hat_otimes(const TensorField2& phi, const TensorField2& psi, const SurfaceGeometry& geo);
TensorField2 wedge(const TensorField2& phi, const TensorField2& psi, const SurfaceGeometry& geo);
// Mixed (1,1) form chi^A_B = gamma^{AC} chi_CB.
TensorField2 mixed(const TensorField2& chi, const SurfaceGeometry& geo);
TensorField2 add(const TensorField2& x, const TensorField2& y, double a = 1.0, double b = 1.0);
TensorField2 scale(const TensorField2& x, std::span<const double> s);
}  // namespace calc

// Name-based entry point: op in {grad, div, curl, nabla_otimes, trace,
// tracefree, hodge, raise, dot, hat_otimes, wedge}.
TensorField2 angular_calculus(const std::string& op, const TensorField2& a, const TensorField2* b,
                              const SurfaceGeometry& geo);

}  // namespace hfl
