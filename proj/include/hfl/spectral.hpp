#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "hfl/grid.hpp"

namespace hfl {

using Spectrum = std::vector<std::complex<double>>;

// Real-to-half-complex FFT on a row-major periodic box of rank 1..4.
// Plans are created once per shape (FFTW_ESTIMATE, so results are
// reproducible) and executed on private buffers, so instances may be used
// from several threads.
class RealFFT {
public:
    explicit RealFFT(std::vector<int> dims);
    const std::vector<int>& dims() const { return dims_; }
    std::size_t real_size() const { return nreal_; }
    std::size_t complex_size() const { return ncomplex_; }
    // Integer lattice frequency of complex slot `c` along axis `axis`.
    long frequency(std::size_t c, std::size_t axis) const;
    // True for slots on a Nyquist plane of any even axis.
    bool is_nyquist(std::size_t c, std::size_t axis) const;

    Spectrum forward(std::span<const double> f) const;
    // Normalised inverse: inverse(forward(f)) == f.
    Field inverse(const Spectrum& z) const;

private:
    std::vector<int> dims_;
    std::size_t nreal_ = 1;
    std::size_t ncomplex_ = 1;
    void* plan_fwd_ = nullptr;
    void* plan_inv_ = nullptr;
};

// Spectral derivatives on the angular chart.
class Spectral2D {
public:
    explicit Spectral2D(const AngularGrid& g);
    const AngularGrid& grid() const { return g_; }
    Field d1(std::span<const double> f) const;
    Field d2(std::span<const double> f) const;
    // Returns (d1 f, d2 f) from one forward transform.
    std::pair<Field, Field> gradient(std::span<const double> f) const;
    Field laplacian(std::span<const double> f) const;

    static const Spectral2D& for_grid(const AngularGrid& g);

private:
    AngularGrid g_;
    const RealFFT* fft_;
    std::vector<double> k1_, k2_, lap_;
};

const RealFFT& fft_for(const std::vector<int>& dims);

}  // namespace hfl
