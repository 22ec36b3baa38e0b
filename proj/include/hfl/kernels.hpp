#pragma once

#include <complex>
#include <cstddef>

// Hot inner loops with a scalar reference and an AVX2 variant.
// Elementwise kernels are bitwise identical across variants; reductions
// agree to rounding.
namespace hfl::kern {

struct KernelTable {
    const char* name;
    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // out[i] = y[i] + a * k[i]
    void (*lincomb)(double* out, const double* y, double a, const double* k, std::size_t n);
    // y[i] += c * (k1[i] + 2 k2[i] + 2 k3[i] + k4[i])
    void (*rk4_update)(double* y, double c, const double* k1, const double* k2,
                       const double* k3, const double* k4, std::size_t n);
    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    // df[i] = (f[i-2] - 8 f[i-1] + 8 f[i+1] - f[i+2]) * inv12h for 2 <= i < n-2
    void (*stencil4)(const double* f, double* df, std::size_t n, double inv12h);
    // z[i] *= mask[i]
    void (*cmul_real)(std::complex<double>* z, const double* mask, std::size_t n);
    // z[i] *= i * k[i]
    void (*cmul_ik)(std::complex<double>* z, const double* k, std::size_t n);
};

namespace scalar {
void axpy(double a, const double* x, double* y, std::size_t n);
void lincomb(double* out, const double* y, double a, const double* k, std::size_t n);
void rk4_update(double* y, double c, const double* k1, const double* k2, const double* k3,
                const double* k4, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void stencil4(const double* f, double* df, std::size_t n, double inv12h);
void cmul_real(std::complex<double>* z, const double* mask, std::size_t n);
void cmul_ik(std::complex<double>* z, const double* k, std::size_t n);
}  // namespace scalar

namespace avx2 {
void axpy(double a, const double* x, double* y, std::size_t n);
void lincomb(double* out, const double* y, double a, const double* k, std::size_t n);
void rk4_update(double* y, double c, const double* k1, const double* k2, const double* k3,
                const double* k4, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void stencil4(const double* f, double* df, std::size_t n, double inv12h);
void cmul_real(std::complex<double>* z, const double* mask, std::size_t n);
void cmul_ik(std::complex<double>* z, const double* k, std::size_t n);
}  // namespace avx2

bool cpu_has_avx2();

const KernelTable& scalar_table();
const KernelTable& avx2_table();

// Selected once at first use; HFL_FORCE_SCALAR=1 pins the scalar table.
const KernelTable& active();

}  // namespace hfl::kern
