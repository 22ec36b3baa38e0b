#include "hfl/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "hfl/error.hpp"
#include "hfl/kernels.hpp"

namespace hfl {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

RealFFT::RealFFT(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty() || dims_.size() > 4) throw UsageError("RealFFT supports rank 1..4");
    for (int d : dims_) {
        if (d < 2) throw UsageError("RealFFT: axis length must be >= 2");
        nreal_ *= static_cast<std::size_t>(d);
    }
    ncomplex_ = nreal_ / static_cast<std::size_t>(dims_.back()) * static_cast<std::size_t>(dims_.back() / 2 + 1);
    std::lock_guard<std::mutex> lock(planner_mutex());
    double* in = fftw_alloc_real(nreal_);
    fftw_complex* out = fftw_alloc_complex(ncomplex_);
    const int rank = static_cast<int>(dims_.size());
    plan_fwd_ = fftw_plan_dft_r2c(rank, dims_.data(), in, out, FFTW_ESTIMATE);
    plan_inv_ = fftw_plan_dft_c2r(rank, dims_.data(), out, in, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
}

long RealFFT::frequency(std::size_t c, std::size_t axis) const {
    const std::size_t r = dims_.size();
    std::size_t stride = 1;
    for (std::size_t a = r; a-- > axis + 1;)
        stride *= (a == r - 1) ? static_cast<std::size_t>(dims_.back() / 2 + 1) : static_cast<std::size_t>(dims_[a]);
    std::size_t len = (axis == r - 1) ? static_cast<std::size_t>(dims_.back() / 2 + 1) : static_cast<std::size_t>(dims_[axis]);
    long i = static_cast<long>((c / stride) % len);
    if (axis == r - 1) return i;
    long n = dims_[axis];
    return i <= n / 2 ? i : i - n;
}

bool RealFFT::is_nyquist(std::size_t c, std::size_t axis) const {
    long n = dims_[axis];
    if (n % 2 != 0) return false;
    long k = frequency(c, axis);
    return k == n / 2 || k == -n / 2;
}

Spectrum RealFFT::forward(std::span<const double> f) const {
    if (f.size() != nreal_) throw UsageError("RealFFT::forward: size mismatch");
    double* in = fftw_alloc_real(nreal_);
    fftw_complex* out = fftw_alloc_complex(ncomplex_);
    std::memcpy(in, f.data(), nreal_ * sizeof(double));
    fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_fwd_), in, out);
    Spectrum z(ncomplex_);
    std::memcpy(reinterpret_cast<double*>(z.data()), out, ncomplex_ * sizeof(fftw_complex));
    fftw_free(in);
    fftw_free(out);
    return z;
}

Field RealFFT::inverse(const Spectrum& z) const {
    if (z.size() != ncomplex_) throw UsageError("RealFFT::inverse: size mismatch");
    double* outr = fftw_alloc_real(nreal_);
    fftw_complex* in = fftw_alloc_complex(ncomplex_);
    std::memcpy(in, z.data(), ncomplex_ * sizeof(fftw_complex));
    fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_inv_), in, outr);
    Field f(outr, outr + nreal_);
    const double s = 1.0 / static_cast<double>(nreal_);
    for (double& v : f) v *= s;
    fftw_free(outr);
    fftw_free(in);
    return f;
}

const RealFFT& fft_for(const std::vector<int>& dims) {
    static std::mutex m;
    static std::map<std::vector<int>, std::unique_ptr<RealFFT>> cache;
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(dims);
    if (it == cache.end()) it = cache.emplace(dims, std::make_unique<RealFFT>(dims)).first;
    return *it->second;
}

Spectral2D::Spectral2D(const AngularGrid& g)
    : g_(g), fft_(&fft_for({static_cast<int>(g.n1), static_cast<int>(g.n2)})) {
    const std::size_t nc = fft_->complex_size();
    k1_.resize(nc);
    k2_.resize(nc);
    lap_.resize(nc);
    const double w1 = 2.0 * std::numbers::pi / g.L1;
    const double w2 = 2.0 * std::numbers::pi / g.L2;
    for (std::size_t c = 0; c < nc; ++c) {
        double a = w1 * static_cast<double>(fft_->frequency(c, 0));
        double b = w2 * static_cast<double>(fft_->frequency(c, 1));
        k1_[c] = fft_->is_nyquist(c, 0) ? 0.0 : a;
        k2_[c] = fft_->is_nyquist(c, 1) ? 0.0 : b;
        lap_[c] = -(a * a + b * b);
    }
}

Field Spectral2D::d1(std::span<const double> f) const {
    Spectrum z = fft_->forward(f);
    kern::active().cmul_ik(z.data(), k1_.data(), z.size());
    return fft_->inverse(z);
}

Field Spectral2D::d2(std::span<const double> f) const {
    Spectrum z = fft_->forward(f);
    kern::active().cmul_ik(z.data(), k2_.data(), z.size());
    return fft_->inverse(z);
}

std::pair<Field, Field> Spectral2D::gradient(std::span<const double> f) const {
    Spectrum z = fft_->forward(f);
    Spectrum z2 = z;
    kern::active().cmul_ik(z.data(), k1_.data(), z.size());
    kern::active().cmul_ik(z2.data(), k2_.data(), z2.size());
    return {fft_->inverse(z), fft_->inverse(z2)};
}

Field Spectral2D::laplacian(std::span<const double> f) const {
    Spectrum z = fft_->forward(f);
    kern::active().cmul_real(z.data(), lap_.data(), z.size());
    return fft_->inverse(z);
}

const Spectral2D& Spectral2D::for_grid(const AngularGrid& g) {
    static std::mutex m;
    static std::vector<std::unique_ptr<Spectral2D>> cache;
    std::lock_guard<std::mutex> lock(m);
    for (auto& s : cache)
        if (s->grid() == g) return *s;
    cache.push_back(std::make_unique<Spectral2D>(g));
    return *cache.back();
}

}  // namespace hfl
