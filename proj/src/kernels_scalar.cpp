#include "hfl/kernels.hpp"

namespace hfl::kern::scalar {

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void lincomb(double* out, const double* y, double a, const double* k, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + a * k[i];
}

void rk4_update(double* y, double c, const double* k1, const double* k2, const double* k3,
                const double* k4, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double s = k1[i] + 2.0 * k2[i];
        s = s + 2.0 * k3[i];
        s = s + k4[i];
        y[i] += c * s;
    }
}

double dot(const double* x, const double* y, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        for (int l = 0; l < 4; ++l) acc[l] += x[i + l] * y[i + l];
    double s = (acc[0] + acc[2]) + (acc[1] + acc[3]);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double sum(const double* x, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        for (int l = 0; l < 4; ++l) acc[l] += x[i + l];
    double s = (acc[0] + acc[2]) + (acc[1] + acc[3]);
    for (; i < n; ++i) s += x[i];
    return s;
}

void stencil4(const double* f, double* df, std::size_t n, double inv12h) {
    for (std::size_t i = 2; i + 2 < n; ++i) {
        double s = f[i - 2] - 8.0 * f[i - 1];
        s = s + 8.0 * f[i + 1];
        s = s - f[i + 2];
        df[i] = s * inv12h;
    }
}

void cmul_real(std::complex<double>* z, const double* mask, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] = {z[i].real() * mask[i], z[i].imag() * mask[i]};
}

void cmul_ik(std::complex<double>* z, const double* k, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] = {-z[i].imag() * k[i], z[i].real() * k[i]};
}

}  // namespace hfl::kern::scalar
