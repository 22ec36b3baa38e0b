#include "hfl/comp_compact.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

#include "hfl/error.hpp"
#include "hfl/functions.hpp"

namespace hfl::cc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<long> lattice_frequency(const RealFFT& fft, std::size_t c) {
    std::vector<long> xi(fft.dims().size());
    for (std::size_t a = 0; a < xi.size(); ++a) xi[a] = fft.frequency(c, a);
    return xi;
}

double norm(const std::vector<long>& xi) {
    double s = 0.0;
    for (long k : xi) s += static_cast<double>(k) * static_cast<double>(k);
    return std::sqrt(s);
}

// Weight of a half-complex slot in a sum over the full lattice.
double mirror_weight(const RealFFT& fft, std::size_t c) {
    const long n = fft.dims().back();
    const long k = fft.frequency(c, fft.dims().size() - 1);
    return (k == 0 || (n % 2 == 0 && k == n / 2)) ? 1.0 : 2.0;
}

}  // namespace

std::size_t Box::size() const {
    std::size_t s = 1;
    for (int d : dims) s *= static_cast<std::size_t>(d);
    return s;
}

double Box::coord(std::size_t axis, std::size_t index) const {
    return kTwoPi * static_cast<double>(index) / static_cast<double>(dims.at(axis));
}

std::vector<std::size_t> Box::point(std::size_t p) const {
    std::vector<std::size_t> idx(dims.size());
    for (std::size_t a = dims.size(); a-- > 0;) {
        idx[a] = p % static_cast<std::size_t>(dims[a]);
        p /= static_cast<std::size_t>(dims[a]);
    }
    return idx;
}

void Box::validate() const {
    if (dims.size() != 2 && dims.size() != 4) throw UsageError("comp_compact: box must be 2D or 4D");
    for (int d : dims)
        if (d < 4) throw UsageError("comp_compact: axis length must be >= 4");
    if (dims.size() == 4)
        for (int d : dims)
            if (d > 32) throw UsageError("comp_compact: 4D boxes are limited to 32^4");
}

Box box2(int n) { return Box{{n, n}}; }
Box box4(int n) { return Box{{n, n, n, n}}; }

std::array<double, 3> masks(const std::vector<long>& xi, double C1, Role role) {
    if (xi.size() < 2) throw UsageError("masks: need at least two frequency components");
    const double lo = fn::plateau(norm(xi) / (2.0 * C1));
    const double a = std::abs(static_cast<double>(xi[0]));
    const double b = std::abs(static_cast<double>(xi[1]));
    if (role == Role::F) {
        const double dir = a == 0.0 ? 0.0 : fn::plateau(100.0 * C1 * b / a);
        const double h1 = (1.0 - lo) * dir;
        return {lo, h1, 1.0 - lo - h1};
    }
    const double dir = b == 0.0 ? 0.0 : fn::plateau(100.0 * C1 * a / b);
    const double h2 = (1.0 - lo) * dir;
    return {lo, 1.0 - lo - h2, h2};
}

double FrequencyDecomposition::reconstruction_error(const Field& f) const {
    if (f.size() != low.size()) throw UsageError("reconstruction_error: size mismatch");
    double e = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) e = std::max(e, std::abs(f[i] - low[i] - h1[i] - h2[i]));
    return e;
}

FrequencyDecomposition decompose(const Field& f, const Box& box, double C1, Role role) {
    box.validate();
    if (!(C1 > 1.0)) throw UsageError("decompose: C1 must exceed 1");
    if (f.size() != box.size()) throw UsageError("decompose: field does not match the box");
    const int nmin = *std::min_element(box.dims.begin(), box.dims.end());
    if (4.0 * C1 > 0.5 * nmin) {
        std::ostringstream os;
        os << "decompose: C1 = " << C1 << " puts the cutoff 4 C1 beyond the Nyquist band " << nmin / 2;
        throw UsageError(os.str());
    }
    const RealFFT& fft = fft_for(box.dims);
    const Spectrum z = fft.forward(f);
    FrequencyDecomposition d;
    d.box = box;
    d.C1 = C1;
    d.role = role;
    const std::size_t nc = fft.complex_size();
    d.mask_low.resize(nc);
    d.mask_h1.resize(nc);
    d.mask_h2.resize(nc);
    Spectrum zl(nc), z1(nc), z2(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        const auto m = masks(lattice_frequency(fft, c), C1, role);
        d.mask_low[c] = m[0];
        d.mask_h1[c] = m[1];
        d.mask_h2[c] = m[2];
        zl[c] = m[0] * z[c];
        z1[c] = m[1] * z[c];
        z2[c] = m[2] * z[c];
    }
    d.low = fft.inverse(zl);
    d.h1 = fft.inverse(z1);
    d.h2 = fft.inverse(z2);
    return d;
}

std::pair<double, double> parseval(const Field& f, const Box& box) {
    box.validate();
    const RealFFT& fft = fft_for(box.dims);
    const Spectrum z = fft.forward(f);
    const double N = static_cast<double>(box.size());
    double phys = 0.0, spec = 0.0;
    for (double v : f) phys += v * v;
    for (std::size_t c = 0; c < z.size(); ++c) spec += mirror_weight(fft, c) * std::norm(z[c]);
    return {phys / N, spec / (N * N)};
}

SupportReport support_check(const FrequencyDecomposition& d1, const FrequencyDecomposition& d2, double threshold) {
    if (d1.box.dims != d2.box.dims) throw UsageError("support_check: decompositions live on different boxes");
    SupportReport r;
    r.margin = std::numeric_limits<double>::infinity();
    Field p(d1.h1.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = d1.h1[i] * d2.h2[i];
    const RealFFT& fft = fft_for(d1.box.dims);
    const Spectrum z = fft.forward(p);
    double peak = 0.0;
    for (const auto& v : z) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return r;
    const double C1 = std::min(d1.C1, d2.C1);
    for (std::size_t c = 0; c < z.size(); ++c) {
        const double k = norm(lattice_frequency(fft, c));
        const double rel = std::abs(z[c]) / peak;
        if (k < C1) r.low_relative = std::max(r.low_relative, rel);
        if (rel > threshold) r.margin = std::min(r.margin, k);
    }
    r.ok = r.low_relative <= threshold;
    return r;
}

Field synthesize(const Box& box, const std::vector<Mode>& modes) {
    box.validate();
    Field f(box.size(), 0.0);
    for (std::size_t p = 0; p < f.size(); ++p) {
        const auto idx = box.point(p);
        double s = 0.0;
        for (const Mode& m : modes) {
            if (m.xi.size() != box.dims.size()) throw UsageError("synthesize: mode rank does not match the box");
            double arg = m.phase;
            for (std::size_t a = 0; a < idx.size(); ++a) arg += static_cast<double>(m.xi[a]) * box.coord(a, idx[a]);
            s += m.amplitude * std::cos(arg);
        }
        f[p] = s;
    }
    return f;
}

bool SequencePair::transverse() const {
    for (int a : f_bounded)
        for (int b : h_bounded)
            if (a != b) return true;
    return false;
}

SequencePair named_pair(const std::string& name) {
    SequencePair s;
    s.name = name;
    auto zero = [](double, double) { return 0.0; };
    if (name == "transverse") {
        auto F = [](double u, double ub) { return std::exp(0.5 * std::cos(u)) * (1.0 + 0.3 * std::sin(ub)); };
        auto G = [](double u, double ub) { return 1.0 / (1.5 + std::cos(u - ub)); };
        s.f = [F](int n, double u, double ub) { return F(u, ub) * std::sin(n * ub); };
        s.h = [G](int n, double u, double ub) { return G(u, ub) * std::sin(n * u); };
        s.f_inf = zero;
        s.h_inf = zero;
        s.f_bounded = {0};
        s.h_bounded = {1};
    } else if (name == "sin2") {
        s.f = [](int n, double, double ub) { return std::sin(n * ub); };
        s.h = s.f;
        s.f_inf = zero;
        s.h_inf = zero;
        s.f_bounded = {0};
        s.h_bounded = {0};
    } else if (name == "strong-weak") {
        auto f = [](double u, double ub) { return std::exp(std::sin(u) + 0.5 * std::cos(ub)); };
        auto hinf = [](double u, double) { return 0.3 + 0.5 * std::cos(u); };
        auto G = [](double u, double ub) { return 1.0 / (2.0 + std::sin(u + 2.0 * ub)); };
        s.f = [f](int, double u, double ub) { return f(u, ub); };
        s.h = [hinf, G](int n, double u, double ub) { return hinf(u, ub) + G(u, ub) * std::sin(n * ub); };
        s.f_inf = f;
        s.h_inf = hinf;
        s.f_bounded = {0, 1};
        s.h_bounded = {0};
    } else {
        throw UsageError("unknown sequence pair '" + name + "' (expected transverse, sin2, strong-weak)");
    }
    return s;
}

std::vector<std::string> pair_names() { return {"transverse", "sin2", "strong-weak"}; }

namespace {

double derivative_l2(const Field& f, const Box& box, int axis) {
    const RealFFT& fft = fft_for(box.dims);
    Spectrum z = fft.forward(f);
    for (std::size_t c = 0; c < z.size(); ++c) {
        const double k = fft.is_nyquist(c, static_cast<std::size_t>(axis))
                             ? 0.0
                             : static_cast<double>(fft.frequency(c, static_cast<std::size_t>(axis)));
        z[c] *= std::complex<double>(0.0, k);
    }
    const Field d = fft.inverse(z);
    double s = 0.0;
    for (double v : d) s += v * v;
    return std::sqrt(s / static_cast<double>(d.size()));
}

Field sample2(const Box& box, const std::function<double(double, double)>& g) {
    Field out(box.size());
    const auto n1 = static_cast<std::size_t>(box.dims[1]);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = g(box.coord(0, p / n1), box.coord(1, p % n1));
    return out;
}

}  // namespace

WeakProductResult weak_product_test(const SequencePair& pair, const Fn2& psi, const std::vector<int>& ns, int grid,
                                    double tolerance) {
    if (ns.empty()) throw UsageError("weak_product_test: empty n sequence");
    for (int n : ns)
        if (n < 1) throw UsageError("weak_product_test: n must be positive");
    const int nmax = *std::max_element(ns.begin(), ns.end());
    if (grid < 4 * nmax) throw UsageError("weak_product_test: grid must be at least 4 max n");
    const Box box = box2(grid);
    const Field ps = sample2(box, psi);
    const double N = static_cast<double>(box.size());
    WeakProductResult r;
    r.pair = pair.name;
    r.tolerance = tolerance;
    r.transverse = pair.transverse();
    double pm = 0.0, lim = 0.0;
    const Field fi = sample2(box, pair.f_inf), hi = sample2(box, pair.h_inf);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        pm += ps[i];
        lim += fi[i] * hi[i] * ps[i];
    }
    r.psi_mean = pm / N;
    r.limit = lim / N;

    auto row = [&](int n) {
        PairingRow w;
        w.n = n;
        const Field f = sample2(box, [&](double u, double ub) { return pair.f(n, u, ub); });
        const Field h = sample2(box, [&](double u, double ub) { return pair.h(n, u, ub); });
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * h[i] * ps[i];
        w.pairing = s / N;
        w.gap = w.pairing - r.limit;
        for (int a : pair.f_bounded) w.f_bound = std::max(w.f_bound, derivative_l2(f, box, a));
        for (int a : pair.h_bounded) w.h_bound = std::max(w.h_bound, derivative_l2(h, box, a));
        return w;
    };
    std::vector<std::future<PairingRow>> jobs;
    for (int n : ns) jobs.push_back(std::async(std::launch::async, row, n));
    for (auto& j : jobs) r.rows.push_back(j.get());

    const auto& first = r.rows.front();
    const auto& last = r.rows.back();
    auto grows = [](double a, double b) { return b > 2.0 * std::max(a, 1e-300); };
    r.bounds_ok = !(grows(first.f_bound, last.f_bound) || grows(first.h_bound, last.h_bound));

    // Least squares pairing = L + c / n.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& w : r.rows) {
        const double x = 1.0 / w.n;
        sx += x;
        sy += w.pairing;
        sxx += x * x;
        sxy += x * w.pairing;
    }
    const double m = static_cast<double>(r.rows.size());
    const double det = m * sxx - sx * sx;
    r.extrapolated = std::abs(det) > 0.0 ? (sy * sxx - sx * sxy) / det : sy / m;
    r.verdict = std::abs(last.gap) <= tolerance && std::abs(last.gap) <= std::abs(first.gap) + tolerance * 1e-3;
    return r;
}

}  // namespace hfl::cc
