#include "hfl/spacetime.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "hfl/error.hpp"

namespace hfl {

void MetricBlock::allocate() {
    for (auto& row : g)
        for (auto& f : row) f.assign(size(), 0.0);
}

bool interior(const MetricBlock& m, std::size_t p, std::size_t margin) {
    std::size_t i0 = p / m.n1(), i1 = p % m.n1();
    bool ok0 = i0 >= margin && i0 + margin < m.n0();
    bool ok1 = m.nactive == 1 || (i1 >= margin && i1 + margin < m.n1());
    return ok0 && ok1;
}

namespace {

inline int sidx(int a, int b) {
    static const int t[4][4] = {{0, 1, 2, 3}, {1, 4, 5, 6}, {2, 5, 7, 8}, {3, 6, 8, 9}};
    return t[a][b];
}

// Derivative of f along `axis` (0 or 1) of the sample array.
Field axis_derivative(const MetricBlock& m, const Field& f, int axis) {
    Field df(f.size());
    const std::size_t n0 = m.n0(), n1 = m.n1();
    if (axis == 0) {
        for (std::size_t j = 0; j < n1; ++j) fd4_derivative_strided(f.data() + j, df.data() + j, n0, n1, m.axis0.h());
    } else {
        for (std::size_t i = 0; i < n0; ++i) fd4_derivative_strided(f.data() + i * n1, df.data() + i * n1, n1, 1, m.axis1.h());
    }
    return df;
}

double fourth_difference_indicator(const MetricBlock& m, const Field& f, int axis) {
    const std::size_t n0 = m.n0(), n1 = m.n1();
    const std::size_t len = axis == 0 ? n0 : n1;
    const std::size_t stride = axis == 0 ? n1 : 1;
    const std::size_t lines = axis == 0 ? n1 : n0;
    double worst = 0.0;
    for (std::size_t l = 0; l < lines; ++l) {
        const double* v = f.data() + (axis == 0 ? l : l * n1);
        double mean = 0.0;
        for (std::size_t i = 0; i < len; ++i) mean += v[i * stride];
        mean /= static_cast<double>(len);
        double amp = 0.0, d4 = 0.0;
        for (std::size_t i = 0; i < len; ++i) amp = std::max(amp, std::abs(v[i * stride] - mean));
        if (amp < 1e-300) continue;
        for (std::size_t i = 2; i + 2 < len; ++i) {
            double d = v[(i - 2) * stride] - 4 * v[(i - 1) * stride] + 6 * v[i * stride] - 4 * v[(i + 1) * stride] +
                       v[(i + 2) * stride];
            d4 = std::max(d4, std::abs(d));
        }
        worst = std::max(worst, d4 / amp);
    }
    return worst;
}

}  // namespace

RicciResult spacetime_ricci(const MetricBlock& m) {
    if (m.nactive < 1 || m.nactive > 2) throw UsageError("spacetime_ricci: 1 or 2 active coordinates");
    if (m.n0() < 5 || (m.nactive == 2 && m.n1() < 5)) throw UsageError("spacetime_ricci: need >= 5 samples per axis");
    const std::size_t N = m.size();
    const int na = m.nactive;

    // Metric derivatives dg[a][s] along axis a for symmetric slot s.
    std::array<std::array<Field, 10>, 2> dg;
    for (int a = 0; a < na; ++a)
        for (int mu = 0; mu < 4; ++mu)
            for (int nu = mu; nu < 4; ++nu) dg[a][sidx(mu, nu)] = axis_derivative(m, m.g[mu][nu], a);

    auto axis_of = [&](int coord) {
        for (int a = 0; a < na; ++a)
            if (m.active[a] == coord) return a;
        return -1;
    };
    int axis_for[4];
    for (int c = 0; c < 4; ++c) axis_for[c] = axis_of(c);

    // Christoffels Gam[lam][sym(mu,nu)], and contraction Gc[mu] = Gam^a_{a mu}.
    std::array<std::array<Field, 10>, 4> Gam;
    std::array<Field, 4> Gc;
    for (auto& row : Gam)
        for (auto& f : row) f.assign(N, 0.0);
    for (auto& f : Gc) f.assign(N, 0.0);

    for (std::size_t p = 0; p < N; ++p) {
        Eigen::Matrix4d G;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) G(a, b) = m.g[a][b][p];
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(G, Eigen::EigenvaluesOnly);
        int neg = 0;
        for (int k = 0; k < 4; ++k) neg += es.eigenvalues()(k) < 0.0 ? 1 : 0;
        if (neg != 1 || es.eigenvalues().cwiseAbs().minCoeff() == 0.0) {
            std::ostringstream os;
            os << "spacetime_ricci: metric not Lorentzian at sample " << p;
            throw NumericalError(os.str(), 0.0, static_cast<long>(p));
        }
        Eigen::Matrix4d Gi = G.inverse();
        auto d = [&](int c, int mu, int nu) {
            int a = axis_for[c];
            return a < 0 ? 0.0 : dg[a][sidx(mu, nu)][p];
        };
        for (int mu = 0; mu < 4; ++mu)
            for (int nu = mu; nu < 4; ++nu) {
                double low[4];
                for (int s = 0; s < 4; ++s) low[s] = 0.5 * (d(mu, s, nu) + d(nu, s, mu) - d(s, mu, nu));
                for (int l = 0; l < 4; ++l) {
                    double v = 0.0;
                    for (int s = 0; s < 4; ++s) v += Gi(l, s) * low[s];
                    Gam[l][sidx(mu, nu)][p] = v;
                }
            }
        for (int mu = 0; mu < 4; ++mu) {
            double v = 0.0;
            for (int a = 0; a < 4; ++a) v += Gam[a][sidx(a, mu)][p];
            Gc[mu][p] = v;
        }
    }

    // d_alpha Gam^alpha_{mu nu} summed over active alpha; d_nu Gc_mu.
    std::array<Field, 10> divG;
    for (auto& f : divG) f.assign(N, 0.0);
    for (int a = 0; a < na; ++a) {
        int c = m.active[a];
        for (int s = 0; s < 10; ++s) {
            Field d = axis_derivative(m, Gam[c][s], a);
            for (std::size_t p = 0; p < N; ++p) divG[s][p] += d[p];
        }
    }
    std::array<std::array<Field, 4>, 2> dGc;
    for (int a = 0; a < na; ++a)
        for (int mu = 0; mu < 4; ++mu) dGc[a][mu] = axis_derivative(m, Gc[mu], a);

    RicciResult r;
    r.ric = m;
    r.ric.allocate();
    r.scalar.assign(N, 0.0);
    for (std::size_t p = 0; p < N; ++p) {
        Eigen::Matrix4d G;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) G(a, b) = m.g[a][b][p];
        Eigen::Matrix4d Gi = G.inverse();
        auto gam = [&](int l, int mu, int nu) { return Gam[l][sidx(mu, nu)][p]; };
        double R = 0.0;
        for (int mu = 0; mu < 4; ++mu)
            for (int nu = mu; nu < 4; ++nu) {
                double v = divG[sidx(mu, nu)][p];
                int a = axis_for[nu];
                if (a >= 0) v -= dGc[a][mu][p];
                for (int b = 0; b < 4; ++b) v += Gc[b][p] * gam(b, mu, nu);
                for (int al = 0; al < 4; ++al)
                    for (int b = 0; b < 4; ++b) v -= gam(al, nu, b) * gam(b, al, mu);
                r.ric.set(mu, nu, p, v);
                R += (mu == nu ? 1.0 : 2.0) * Gi(mu, nu) * v;
            }
        r.scalar[p] = R;
        if (interior(m, p, r.margin))
            for (int mu = 0; mu < 4; ++mu)
                for (int nu = 0; nu < 4; ++nu) r.max_interior = std::max(r.max_interior, std::abs(r.ric.g[mu][nu][p]));
    }

    for (int a = 0; a < na; ++a)
        for (int mu = 0; mu < 4; ++mu)
            for (int nu = mu; nu < 4; ++nu)
                r.resolution_indicator = std::max(r.resolution_indicator, fourth_difference_indicator(m, m.g[mu][nu], a));
    r.underresolved = r.resolution_indicator > 0.025;
    return r;
}

MetricBlock einstein_tensor(const MetricBlock& m, const RicciResult& r) {
    MetricBlock G = m;
    G.allocate();
    for (std::size_t p = 0; p < m.size(); ++p)
        for (int mu = 0; mu < 4; ++mu)
            for (int nu = mu; nu < 4; ++nu) G.set(mu, nu, p, r.ric.g[mu][nu][p] - 0.5 * r.scalar[p] * m.g[mu][nu][p]);
    return G;
}

}  // namespace hfl
