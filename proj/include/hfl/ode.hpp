#pragma once

#include <array>
#include <cstddef>

namespace hfl {

// One classical RK4 step for a small fixed-size system y' = f(x, y).
template <std::size_t N, class F>
std::array<double, N> rk4_step(F&& f, double x, const std::array<double, N>& y, double h) {
    auto add = [](const std::array<double, N>& a, double c, const std::array<double, N>& b) {
        std::array<double, N> r;
        for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + c * b[i];
        return r;
    };
    auto k1 = f(x, y);
    auto k2 = f(x + 0.5 * h, add(y, 0.5 * h, k1));
    auto k3 = f(x + 0.5 * h, add(y, 0.5 * h, k2));
    auto k4 = f(x + h, add(y, h, k3));
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace hfl
