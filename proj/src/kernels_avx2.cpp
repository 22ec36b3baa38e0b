#include <immintrin.h>

#include "hfl/kernels.hpp"

// Multiplies and adds are kept separate (no FMA) so elementwise results match
// the scalar reference bit for bit.
namespace hfl::kern::avx2 {

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, vy);
    }
    scalar::axpy(a, x + i, y + i, n - i);
}

void lincomb(double* out, const double* y, double a, const double* k, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d r = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(k + i)));
        _mm256_storeu_pd(out + i, r);
    }
    scalar::lincomb(out + i, y + i, a, k + i, n - i);
}

void rk4_update(double* y, double c, const double* k1, const double* k2, const double* k3,
                const double* k4, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d s = _mm256_add_pd(_mm256_loadu_pd(k1 + i), _mm256_mul_pd(two, _mm256_loadu_pd(k2 + i)));
        s = _mm256_add_pd(s, _mm256_mul_pd(two, _mm256_loadu_pd(k3 + i)));
        s = _mm256_add_pd(s, _mm256_loadu_pd(k4 + i));
        __m256d vy = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(vc, s));
        _mm256_storeu_pd(y + i, vy);
    }
    scalar::rk4_update(y + i, c, k1 + i, k2 + i, k3 + i, k4 + i, n - i);
}

static double hsum(__m256d v) {
    alignas(32) double t[4];
    _mm256_store_pd(t, v);
    return (t[0] + t[2]) + (t[1] + t[3]);
}

double dot(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

void stencil4(const double* f, double* df, std::size_t n, double inv12h) {
    if (n < 5) return;
    const __m256d eight = _mm256_set1_pd(8.0);
    const __m256d vs = _mm256_set1_pd(inv12h);
    std::size_t i = 2;
    for (; i + 4 + 2 <= n; i += 4) {
        __m256d s = _mm256_sub_pd(_mm256_loadu_pd(f + i - 2), _mm256_mul_pd(eight, _mm256_loadu_pd(f + i - 1)));
        s = _mm256_add_pd(s, _mm256_mul_pd(eight, _mm256_loadu_pd(f + i + 1)));
        s = _mm256_sub_pd(s, _mm256_loadu_pd(f + i + 2));
        _mm256_storeu_pd(df + i, _mm256_mul_pd(s, vs));
    }
    for (; i + 2 < n; ++i) {
        double s = f[i - 2] - 8.0 * f[i - 1];
        s = s + 8.0 * f[i + 1];
        s = s - f[i + 2];
        df[i] = s * inv12h;
    }
}

void cmul_real(std::complex<double>* z, const double* mask, std::size_t n) {
    double* d = reinterpret_cast<double*>(z);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m128d m = _mm_loadu_pd(mask + i);
        __m256d mm = _mm256_permute4x64_pd(_mm256_castpd128_pd256(m), 0x50);
        _mm256_storeu_pd(d + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(d + 2 * i), mm));
    }
    scalar::cmul_real(z + i, mask + i, n - i);
}

void cmul_ik(std::complex<double>* z, const double* k, std::size_t n) {
    double* d = reinterpret_cast<double*>(z);
    const __m256d sign = _mm256_set_pd(1.0, -1.0, 1.0, -1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m128d kk = _mm_loadu_pd(k + i);
        __m256d km = _mm256_permute4x64_pd(_mm256_castpd128_pd256(kk), 0x50);
        __m256d v = _mm256_loadu_pd(d + 2 * i);
        __m256d sw = _mm256_permute_pd(v, 0x5);  // (im, re) pairs
        sw = _mm256_mul_pd(sw, sign);
        _mm256_storeu_pd(d + 2 * i, _mm256_mul_pd(sw, km));
    }
    scalar::cmul_ik(z + i, k + i, n - i);
}

}  // namespace hfl::kern::avx2
