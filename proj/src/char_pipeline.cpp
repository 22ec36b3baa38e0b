#include "hfl/char_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <tuple>

#include "hfl/constraints.hpp"
#include "hfl/error.hpp"
#include "hfl/kernels.hpp"

namespace hfl::cp {

namespace {

constexpr std::size_t kVars = 9;  // eta1 eta2 b1 b2 omegab trchib cb11 cb12 cb22

std::vector<Field> along_slices(const std::vector<const Field*>& f, double h) {
    const std::size_t N = f.size(), P = f.front()->size();
    std::vector<Field> out(N, Field(P));
    Field line(N), d;
    for (std::size_t p = 0; p < P; ++p) {
        for (std::size_t i = 0; i < N; ++i) line[i] = (*f[i])[p];
        d = fd4_derivative(line, h);
        for (std::size_t i = 0; i < N; ++i) out[i][p] = d[i];
    }
    return out;
}

std::vector<Field> along_slices(const std::vector<Field>& f, double h) {
    std::vector<const Field*> ptr(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) ptr[i] = &f[i];
    return along_slices(ptr, h);
}

std::vector<Field> component_series(const std::vector<TensorField2>& t, std::size_t c) {
    std::vector<Field> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i].comp[c];
    return out;
}

TensorField2 one_form_from(const double* y1, const double* y2, std::size_t P) {
    return TensorField2::one_form(Field(y1, y1 + P), Field(y2, y2 + P));
}

TensorField2 etab_from(const TensorField2& eta, const TensorField2& glog) {
    TensorField2 out(0, 1, eta.npts);
    for (int A = 0; A < 2; ++A)
        for (std::size_t p = 0; p < eta.npts; ++p) out.comp[A][p] = 2.0 * glog.comp[A][p] - eta.comp[A][p];
    return out;
}

// (chi . psi)_A = chi^B_A psi_B with the mixed form m^B_A at comp[(B << 1) | A].
double mixed_apply(const TensorField2& m, const TensorField2& psi, int A, std::size_t p) {
    return m.comp[A][p] * psi.comp[0][p] + m.comp[2 | A][p] * psi.comp[1][p];
}

double sup(const Field& f) {
    double s = 0.0;
    for (double v : f) s = std::max(s, std::abs(v));
    return s;
}

// Slice quantities that depend on the data only.
struct SliceData {
    std::unique_ptr<SurfaceGeometry> geo;
    TensorField2 glog, divchihat, gradtrchi, mix;
    Field K;
};

SliceData slice_data(const ReducedCharData& data, const Outgoing& out, std::size_t i) {
    SliceData s;
    TensorField2 g = data.gamma(i);
    s.geo = std::make_unique<SurfaceGeometry>(g, data.chart);
    Field logO(data.Omega[i].size());
    for (std::size_t p = 0; p < logO.size(); ++p) logO[p] = std::log(data.Omega[i][p]);
    s.glog = calc::grad(TensorField2::scalar(std::move(logO)), *s.geo);
    s.divchihat = calc::div(out.chihat[i], *s.geo);
    s.gradtrchi = calc::grad(TensorField2::scalar(out.trchi[i]), *s.geo);
    s.mix = calc::mixed(out.chi[i], *s.geo);
    s.K = gauss_curvature(g, data.chart).K;
    for (std::size_t p = 0; p < s.K.size(); ++p) s.K[p] += data.K_ref / (data.Phi[i][p] * data.Phi[i][p]);
    return s;
}

void rhs(const ReducedCharData& data, const Outgoing& out, const SliceData& s, std::size_t i, const double* y,
         double* dy) {
    const std::size_t P = data.chart.size();
    const SurfaceGeometry& geo = *s.geo;
    TensorField2 eta = one_form_from(y, y + P, P);
    TensorField2 etab = etab_from(eta, s.glog);
    TensorField2 chibhat = TensorField2::sym2(Field(y + 6 * P, y + 7 * P), Field(y + 7 * P, y + 8 * P),
                                              Field(y + 8 * P, y + 9 * P));
    TensorField2 dif(0, 1, P);
    for (int A = 0; A < 2; ++A)
        for (std::size_t p = 0; p < P; ++p) dif.comp[A][p] = eta.comp[A][p] - etab.comp[A][p];
    const TensorField2& chihat = out.chihat[i];
    TensorField2 dchi = calc::dot(chihat, dif, geo);
    TensorField2 dif_up = calc::raise(dif, geo);
    Field div_etab = calc::div(etab, geo).comp[0];
    TensorField2 nab_etab = calc::nabla_otimes(etab, geo);
    TensorField2 etab_etab = calc::hat_otimes(etab, etab, geo);
    Field eta_etab = calc::dot(eta, etab, geo).comp[0];
    Field eta_sq = calc::dot(eta, eta, geo).comp[0];
    Field etab_sq = calc::dot(etab, etab, geo).comp[0];
    Field chis_chibs = calc::dot(chihat, chibhat, geo).comp[0];
    const Field& Om = data.Omega[i];
    const Field& tr = out.trchi[i];
    const Field& w = out.omega[i];
    for (std::size_t p = 0; p < P; ++p) {
        const double O = Om[p];
        const double omb = y[4 * P + p], trb = y[5 * P + p];
        for (int A = 0; A < 2; ++A) {
            double v = mixed_apply(s.mix, eta, A, p) - 0.75 * tr[p] * dif.comp[A][p] + s.divchihat.comp[A][p] -
                       0.5 * s.gradtrchi.comp[A][p] - 0.5 * dchi.comp[A][p];
            dy[A * P + p] = O * v;
            dy[(2 + A) * P + p] = -2.0 * O * O * dif_up.comp[A][p];
        }
        dy[4 * P + p] = O * (2.0 * w[p] * omb - eta_etab[p] + 0.5 * eta_sq[p] -
                             0.5 * (s.K[p] - 0.5 * chis_chibs[p] + 0.25 * tr[p] * trb));
        dy[5 * P + p] = O * (-tr[p] * trb + 2.0 * w[p] * trb - 2.0 * s.K[p] + 2.0 * div_etab[p] + 2.0 * etab_sq[p]);
        const int slots[3][2] = {{0, 0}, {0, 1}, {1, 1}};
        for (int c = 0; c < 3; ++c) {
            const int A = slots[c][0], B = slots[c][1];
            double v = 0.0;
            for (int C = 0; C < 2; ++C)
                v += s.mix.comp[(C << 1) | A][p] * chibhat.comp[(C << 1) | B][p] +
                     s.mix.comp[(C << 1) | B][p] * chibhat.comp[(A << 1) | C][p];
            const std::size_t ab = static_cast<std::size_t>((A << 1) | B);
            v += -0.5 * tr[p] * chibhat.comp[ab][p] + nab_etab.comp[ab][p] + 2.0 * w[p] * chibhat.comp[ab][p] -
                 0.5 * trb * chihat.comp[ab][p] + etab_etab.comp[ab][p];
            dy[(6 + c) * P + p] = O * v;
        }
    }
}

void project_tracefree(double* y, const SurfaceGeometry& geo, std::size_t P) {
    const auto& g = geo.metric();
    for (std::size_t p = 0; p < P; ++p) {
        double t = geo.inv(0, 0)[p] * y[6 * P + p] + 2.0 * geo.inv(0, 1)[p] * y[7 * P + p] +
                   geo.inv(1, 1)[p] * y[8 * P + p];
        y[6 * P + p] -= 0.5 * t * g.comp[0][p];
        y[7 * P + p] -= 0.5 * t * g.comp[1][p];
        y[8 * P + p] -= 0.5 * t * g.comp[3][p];
    }
}

void check_bound(const std::vector<double>& y, std::size_t P, double bound, double ubar) {
    static const char* names[kVars] = {"eta_1", "eta_2", "b^1", "b^2", "omegab", "trchib", "chibhat_11",
                                       "chibhat_12", "chibhat_22"};
    for (std::size_t k = 0; k < y.size(); ++k)
        if (!std::isfinite(y[k]) || std::abs(y[k]) > bound) {
            std::ostringstream os;
            os << "solve_transport_system: blow-up in " << names[k / P] << " at ubar = " << ubar << ", point "
               << k % P;
            throw NumericalError(os.str(), ubar, static_cast<long>(k % P));
        }
}

}  // namespace

TensorField2 ReducedCharData::gamma(std::size_t i) const {
    const std::size_t P = chart.size();
    Field a(P), b(P), d(P);
    for (std::size_t p = 0; p < P; ++p) {
        double s = Phi[i][p] * Phi[i][p];
        a[p] = s * gamma_hat[i].a[p];
        b[p] = s * gamma_hat[i].b[p];
        d[p] = s * gamma_hat[i].d[p];
    }
    return TensorField2::sym2(std::move(a), std::move(b), std::move(d));
}

void ReducedCharData::validate() const {
    const std::size_t N = slices(), P = chart.size();
    if (N < 5) throw UsageError("ReducedCharData: at least 5 slices required");
    if (!(h > 0.0)) throw UsageError("ReducedCharData: h must be positive");
    if (Phi.size() != N || dPhi.size() != N || gamma_hat.size() != N)
        throw UsageError("ReducedCharData: slice counts differ");
    if (!dgamma_hat.empty() && dgamma_hat.size() != N) throw UsageError("ReducedCharData: dgamma_hat slice count");
    if (!dlog_omega.empty() && dlog_omega.size() != N) throw UsageError("ReducedCharData: dlog_omega slice count");
    for (std::size_t i = 0; i < N; ++i) {
        if (Omega[i].size() != P || Phi[i].size() != P || dPhi[i].size() != P || gamma_hat[i].a.size() != P)
            throw UsageError("ReducedCharData: field size does not match the chart");
        for (std::size_t p = 0; p < P; ++p) {
            if (!(Omega[i][p] > 0.0) || !(Phi[i][p] > 0.0))
                throw NumericalError("ReducedCharData: Omega and Phi must be positive", ubar(i),
                                     static_cast<long>(p));
            Sym2 g{gamma_hat[i].a[p], gamma_hat[i].b[p], gamma_hat[i].d[p]};
            if (!(g.det() > 0.0 && g.a > 0.0))
                throw NumericalError("ReducedCharData: gamma_hat not positive definite", ubar(i),
                                     static_cast<long>(p));
        }
    }
}

ReducedCharData sample_data(const AngularGrid& chart, std::size_t n, double ubar_max, const PairFn& omega,
                            const PairFn& phi, const hf::SymFn& gamma_hat, const hf::SymFn& dgamma_hat) {
    if (n < 5) throw UsageError("sample_data: at least 5 slices required");
    const std::size_t P = chart.size();
    ReducedCharData d;
    d.chart = chart;
    d.h = ubar_max / static_cast<double>(n - 1);
    d.Omega.assign(n, Field(P));
    d.dlog_omega.assign(n, Field(P));
    d.Phi.assign(n, Field(P));
    d.dPhi.assign(n, Field(P));
    d.gamma_hat.assign(n, SymField{Field(P), Field(P), Field(P)});
    if (dgamma_hat) d.dgamma_hat.assign(n, SymField{Field(P), Field(P), Field(P)});
    for (std::size_t i = 0; i < n; ++i) {
        const double u = d.ubar(i);
        for (std::size_t p = 0; p < P; ++p) {
            std::tie(d.Omega[i][p], d.dlog_omega[i][p]) = omega(u, p);
            std::tie(d.Phi[i][p], d.dPhi[i][p]) = phi(u, p);
            Sym2 g = gamma_hat(u, p);
            d.gamma_hat[i].a[p] = g.a;
            d.gamma_hat[i].b[p] = g.b;
            d.gamma_hat[i].d[p] = g.d;
            if (dgamma_hat) {
                Sym2 dg = dgamma_hat(u, p);
                d.dgamma_hat[i].a[p] = dg.a;
                d.dgamma_hat[i].b[p] = dg.b;
                d.dgamma_hat[i].d[p] = dg.d;
            }
        }
    }
    return d;
}

ReducedCharData data_from_family(const hf::OscillatoryFamily& fam, const hf::Background& bg, std::size_t n,
                                 double ubar_max) {
    if (fam.Phi.ubar.empty()) throw UsageError("data_from_family: Phi_n not solved");
    if (ubar_max > fam.Phi.ubar.back() + 1e-12) throw UsageError("data_from_family: ubar_max beyond the solve");
    auto track = std::make_shared<hf::SolutionTrack>(std::make_shared<const cons::Solution>(fam.Phi));
    PairFn omega = [&](double u, std::size_t p) {
        double O = bg.omega.omega ? bg.omega.omega(u, p) : 1.0;
        double dl = bg.omega.dlog_omega ? bg.omega.dlog_omega(u, p) : 0.0;
        return std::make_pair(O, dl);
    };
    PairFn phi = [&](double u, std::size_t p) { return std::make_pair(track->value(u, p), track->slope(u, p)); };
    hf::SymFn g = [&](double u, std::size_t p) { return fam.gamma(u, p); };
    hf::SymFn dg = [&](double u, std::size_t p) { return fam.dgamma(u, p); };
    return sample_data(bg.chart, n, ubar_max, omega, phi, g, dg);
}

Outgoing derive_outgoing(const ReducedCharData& data) {
    data.validate();
    const std::size_t N = data.slices(), P = data.chart.size();
    Outgoing o;
    o.chi.resize(N);
    o.chihat.resize(N);
    o.trchi.assign(N, Field(P));
    o.omega.assign(N, Field(P));
    o.omega_text.assign(N, Field(P));
    std::vector<Field> dlog = data.dlog_omega;
    if (dlog.empty()) {
        std::vector<Field> logO(N, Field(P));
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t p = 0; p < P; ++p) logO[i][p] = std::log(data.Omega[i][p]);
        dlog = along_slices(logO, data.h);
    }
    std::vector<Sym2> chi(P);
    cons::ChiData fd;
    if (data.dgamma_hat.empty()) fd = cons::chi_from_data(data.h, data.Omega, data.Phi, data.dPhi, data.gamma_hat);
    for (std::size_t i = 0; i < N; ++i) {
        Field a(P), b(P), d(P), ha(P), hb(P), hd(P);
        for (std::size_t p = 0; p < P; ++p) {
            const double O = data.Omega[i][p], F = data.Phi[i][p], dF = data.dPhi[i][p];
            Sym2 gh{data.gamma_hat[i].a[p], data.gamma_hat[i].b[p], data.gamma_hat[i].d[p]};
            Sym2 g{F * F * gh.a, F * F * gh.b, F * F * gh.d};
            Sym2 c;
            if (!data.dgamma_hat.empty()) {
                Sym2 dg{data.dgamma_hat[i].a[p], data.dgamma_hat[i].b[p], data.dgamma_hat[i].d[p]};
                c = {(F * dF * gh.a + 0.5 * F * F * dg.a) / O, (F * dF * gh.b + 0.5 * F * F * dg.b) / O,
                     (F * dF * gh.d + 0.5 * F * F * dg.d) / O};
            } else {
                const double t = fd.trchi[i][p];
                c = {fd.chihat[i].a[p] + 0.5 * t * g.a, fd.chihat[i].b[p] + 0.5 * t * g.b,
                     fd.chihat[i].d[p] + 0.5 * t * g.d};
            }
            Sym2 gi = g.inverse();
            const double tr = gi.a * c.a + 2.0 * gi.b * c.b + gi.d * c.d;
            a[p] = c.a;
            b[p] = c.b;
            d[p] = c.d;
            ha[p] = c.a - 0.5 * tr * g.a;
            hb[p] = c.b - 0.5 * tr * g.b;
            hd[p] = c.d - 0.5 * tr * g.d;
            o.trchi[i][p] = tr;
            o.omega[i][p] = -0.5 * dlog[i][p] / O;
            o.omega_text[i][p] = -2.0 * dlog[i][p] / O;
            o.identity_error = std::max(o.identity_error, std::abs(tr - 2.0 * dF / (O * F)));
        }
        o.chi[i] = TensorField2::sym2(std::move(a), std::move(b), std::move(d));
        o.chihat[i] = TensorField2::sym2(std::move(ha), std::move(hb), std::move(hd));
    }
    return o;
}

CornerData minkowski_corner(const AngularGrid& chart) {
    const std::size_t P = chart.size();
    CornerData c;
    c.dub1.assign(P, 0.0);
    c.dub2.assign(P, 0.0);
    c.omegab.assign(P, 0.0);
    c.trchib.assign(P, -2.0);
    c.chibhat = SymField{Field(P, 0.0), Field(P, 0.0), Field(P, 0.0)};
    return c;
}

RicciCoefficients solve_transport_system(const ReducedCharData& data, const Outgoing& out, const CornerData& corner,
                                         const TransportOptions& opt) {
    data.validate();
    const std::size_t N = data.slices(), P = data.chart.size();
    if (N % 2 == 0) throw UsageError("solve_transport_system: odd slice count required");
    if (out.chi.size() != N) throw UsageError("solve_transport_system: outgoing data does not match the slices");
    if (corner.dub1.size() != P || corner.dub2.size() != P || corner.omegab.size() != P ||
        corner.trchib.size() != P || corner.chibhat.a.size() != P)
        throw UsageError("solve_transport_system: corner data does not match the chart");

    std::vector<SliceData> sl(N);
    for (std::size_t i = 0; i < N; ++i) sl[i] = slice_data(data, out, i);

    const std::size_t M = kVars * P;
    std::vector<double> y(M), k1(M), k2(M), k3(M), k4(M), tmp(M);
    {
        const SurfaceGeometry& geo = *sl[0].geo;
        const auto& g = geo.metric();
        for (std::size_t p = 0; p < P; ++p) {
            const double O2 = data.Omega[0][p] * data.Omega[0][p];
            for (int A = 0; A < 2; ++A) {
                double dlow = -(g.comp[(A << 1)][p] * corner.dub1[p] + g.comp[(A << 1) | 1][p] * corner.dub2[p]) /
                              (2.0 * O2);
                y[A * P + p] = sl[0].glog.comp[A][p] + 0.5 * dlow;
                y[(2 + A) * P + p] = 0.0;
            }
            y[4 * P + p] = corner.omegab[p];
            y[5 * P + p] = corner.trchib[p];
            y[6 * P + p] = corner.chibhat.a[p];
            y[7 * P + p] = corner.chibhat.b[p];
            y[8 * P + p] = corner.chibhat.d[p];
        }
        project_tracefree(y.data(), geo, P);
    }

    const std::size_t outs = (N + 1) / 2;
    RicciCoefficients rc;
    auto record = [&](std::size_t i) {
        const SliceData& s = sl[i];
        TensorField2 eta = one_form_from(y.data(), y.data() + P, P);
        TensorField2 etab = etab_from(eta, s.glog);
        for (int A = 0; A < 2; ++A)
            for (std::size_t p = 0; p < P; ++p)
                rc.relation_error = std::max(
                    rc.relation_error, std::abs(0.5 * (eta.comp[A][p] + etab.comp[A][p]) - s.glog.comp[A][p]));
        rc.slice.push_back(i);
        rc.ubar.push_back(data.ubar(i));
        rc.trchi.push_back(out.trchi[i]);
        rc.omega.push_back(out.omega[i]);
        rc.chihat.push_back(out.chihat[i]);
        rc.K.push_back(s.K);
        rc.eta.push_back(std::move(eta));
        rc.etab.push_back(std::move(etab));
        rc.b.push_back(TensorField2::vector(Field(y.begin() + 2 * P, y.begin() + 3 * P),
                                            Field(y.begin() + 3 * P, y.begin() + 4 * P)));
        rc.omegab.emplace_back(y.begin() + 4 * P, y.begin() + 5 * P);
        rc.trchib.emplace_back(y.begin() + 5 * P, y.begin() + 6 * P);
        rc.chibhat.push_back(TensorField2::sym2(Field(y.begin() + 6 * P, y.begin() + 7 * P),
                                                Field(y.begin() + 7 * P, y.begin() + 8 * P),
                                                Field(y.begin() + 8 * P, y.begin() + 9 * P)));
    };
    record(0);
    const auto& K = kern::active();
    const double H = 2.0 * data.h;
    for (std::size_t j = 1; j < outs; ++j) {
        const std::size_t i0 = 2 * (j - 1), i1 = i0 + 1, i2 = i0 + 2;
        rhs(data, out, sl[i0], i0, y.data(), k1.data());
        K.lincomb(tmp.data(), y.data(), 0.5 * H, k1.data(), M);
        rhs(data, out, sl[i1], i1, tmp.data(), k2.data());
        K.lincomb(tmp.data(), y.data(), 0.5 * H, k2.data(), M);
        rhs(data, out, sl[i1], i1, tmp.data(), k3.data());
        K.lincomb(tmp.data(), y.data(), H, k3.data(), M);
        rhs(data, out, sl[i2], i2, tmp.data(), k4.data());
        K.rk4_update(y.data(), H / 6.0, k1.data(), k2.data(), k3.data(), k4.data(), M);
        project_tracefree(y.data(), *sl[i2].geo, P);
        check_bound(y, P, opt.bound, data.ubar(i2));
        record(i2);
    }
    return rc;
}

double ResidualReport::value(const std::string& name) const {
    for (const auto& [k, v] : max)
        if (k == name) return v;
    throw UsageError("ResidualReport: unknown equation " + name);
}

ResidualReport structure_residuals(const RicciCoefficients& c, const ReducedCharData& data, const Outgoing& out,
                                   const TensorField2* chihat_shift) {
    const std::size_t J = c.slice.size(), P = data.chart.size();
    if (J < 5) throw UsageError("structure_residuals: at least 5 output slices required");
    const double H = c.ubar[1] - c.ubar[0];

    auto d_eta1 = along_slices(component_series(c.eta, 0), H);
    auto d_eta2 = along_slices(component_series(c.eta, 1), H);
    auto d_b1 = along_slices(component_series(c.b, 0), H);
    auto d_b2 = along_slices(component_series(c.b, 1), H);
    auto d_omb = along_slices(c.omegab, H);
    auto d_trb = along_slices(c.trchib, H);
    std::vector<std::vector<Field>> d_cb = {along_slices(component_series(c.chibhat, 0), H),
                                            along_slices(component_series(c.chibhat, 1), H),
                                            along_slices(component_series(c.chibhat, 3), H)};
    auto d_trchi = along_slices(out.trchi, data.h);

    double r44 = 0, r4a = 0, rb = 0, r34 = 0, rtr = 0, rab = 0, rel = 0, tch = 0, tcb = 0;
    ResidualReport rep;
    for (std::size_t j = 0; j < J; ++j) {
        const std::size_t i = c.slice[j];
        SliceData s = slice_data(data, out, i);
        const SurfaceGeometry& geo = *s.geo;
        const TensorField2& eta = c.eta[j];
        const TensorField2& etab = c.etab[j];
        const TensorField2& chibhat = c.chibhat[j];
        const TensorField2& chihat = out.chihat[i];
        TensorField2 dif(0, 1, P);
        for (int A = 0; A < 2; ++A)
            for (std::size_t p = 0; p < P; ++p) dif.comp[A][p] = eta.comp[A][p] - etab.comp[A][p];
        TensorField2 dchi = calc::dot(chihat, dif, geo);
        TensorField2 dif_up = calc::raise(dif, geo);
        Field div_etab = calc::div(etab, geo).comp[0];
        TensorField2 nab_etab = calc::nabla_otimes(etab, geo);
        TensorField2 etab_etab = calc::hat_otimes(etab, etab, geo);
        Field eta_etab = calc::dot(eta, etab, geo).comp[0];
        Field eta_sq = calc::dot(eta, eta, geo).comp[0];
        Field etab_sq = calc::dot(etab, etab, geo).comp[0];
        Field chis_chibs = calc::dot(chihat, chibhat, geo).comp[0];
        TensorField2 ch44 = chihat;
        if (chihat_shift)
            for (std::size_t q = 0; q < 4; ++q)
                for (std::size_t p = 0; p < P; ++p) ch44.comp[q][p] += chihat_shift->comp[q][p];
        Field ch44_sq = calc::dot(ch44, ch44, geo).comp[0];
        tch = std::max(tch, sup(calc::trace(chihat, geo).comp[0]));
        tcb = std::max(tcb, sup(calc::trace(chibhat, geo).comp[0]));
        const Field& tr = out.trchi[i];
        const Field& w = out.omega[i];
        for (std::size_t p = 0; p < P; ++p) {
            const double Oi = 1.0 / data.Omega[i][p], O = data.Omega[i][p];
            const double omb = c.omegab[j][p], trb = c.trchib[j][p];
            r44 = std::max(r44, std::abs(Oi * d_trchi[i][p] + 0.5 * tr[p] * tr[p] + ch44_sq[p] + 2.0 * w[p] * tr[p]));
            const double de[2] = {d_eta1[j][p], d_eta2[j][p]};
            const double db[2] = {d_b1[j][p], d_b2[j][p]};
            for (int A = 0; A < 2; ++A) {
                double v = Oi * de[A] - mixed_apply(s.mix, eta, A, p) + 0.75 * tr[p] * dif.comp[A][p] -
                           s.divchihat.comp[A][p] + 0.5 * s.gradtrchi.comp[A][p] + 0.5 * dchi.comp[A][p];
                r4a = std::max(r4a, std::abs(v));
                rb = std::max(rb, std::abs(db[A] + 2.0 * O * O * dif_up.comp[A][p]));
                rel = std::max(rel, std::abs(0.5 * (eta.comp[A][p] + etab.comp[A][p]) - s.glog.comp[A][p]));
            }
            r34 = std::max(r34, std::abs(Oi * d_omb[j][p] - 2.0 * w[p] * omb + eta_etab[p] - 0.5 * eta_sq[p] +
                                         0.5 * (s.K[p] - 0.5 * chis_chibs[p] + 0.25 * tr[p] * trb)));
            rtr = std::max(rtr, std::abs(Oi * d_trb[j][p] + tr[p] * trb - 2.0 * w[p] * trb + 2.0 * s.K[p] -
                                         2.0 * div_etab[p] - 2.0 * etab_sq[p]));
            const int slots[3][2] = {{0, 0}, {0, 1}, {1, 1}};
            for (int q = 0; q < 3; ++q) {
                const int A = slots[q][0], B = slots[q][1];
                const std::size_t ab = static_cast<std::size_t>((A << 1) | B);
                double v = Oi * d_cb[q][j][p];
                for (int C = 0; C < 2; ++C)
                    v -= s.mix.comp[(C << 1) | A][p] * chibhat.comp[(C << 1) | B][p] +
                         s.mix.comp[(C << 1) | B][p] * chibhat.comp[(A << 1) | C][p];
                v += 0.5 * tr[p] * chibhat.comp[ab][p] - nab_etab.comp[ab][p] - 2.0 * w[p] * chibhat.comp[ab][p] +
                     0.5 * trb * chihat.comp[ab][p] - etab_etab.comp[ab][p];
                rab = std::max(rab, std::abs(v));
            }
        }
    }
    for (std::size_t i = 0; i < data.slices(); ++i) {
        rep.omega_max = std::max(rep.omega_max, sup(out.omega[i]));
        rep.omega_text_max = std::max(rep.omega_text_max, sup(out.omega_text[i]));
    }
    rep.max = {{"Ric44", r44},     {"Ric4A", r4a},        {"metric_b", rb},         {"Ric34", r34},
               {"trRicAB", rtr},   {"RicAB", rab},        {"relation", rel},        {"trace_chihat", tch},
               {"trace_chibhat", tcb}};
    return rep;
}

std::vector<std::pair<std::string, double>> residual_orders(const ResidualReport& coarse, const ResidualReport& fine) {
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t k = 0; k < coarse.max.size(); ++k) {
        const double a = coarse.max[k].second, b = fine.max[k].second;
        out.emplace_back(coarse.max[k].first, (a > 0.0 && b > 0.0) ? std::log2(a / b) : 0.0);
    }
    return out;
}

RenormalizedCurvature renormalized_curvature(const RicciCoefficients& c, std::size_t j, const SurfaceGeometry& geo) {
    if (j >= c.slice.size()) throw UsageError("renormalized_curvature: slice out of range");
    const std::size_t P = geo.size();
    const TensorField2& eta = c.eta[j];
    const TensorField2& etab = c.etab[j];
    TensorField2 dif(0, 1, P);
    for (int A = 0; A < 2; ++A)
        for (std::size_t p = 0; p < P; ++p) dif.comp[A][p] = eta.comp[A][p] - etab.comp[A][p];
    TensorField2 divch = calc::div(c.chihat[j], geo), divcb = calc::div(c.chibhat[j], geo);
    TensorField2 gtr = calc::grad(TensorField2::scalar(c.trchi[j]), geo);
    TensorField2 gtrb = calc::grad(TensorField2::scalar(c.trchib[j]), geo);
    TensorField2 dch = calc::dot(c.chihat[j], dif, geo), dcb = calc::dot(c.chibhat[j], dif, geo);
    RenormalizedCurvature r;
    r.beta = TensorField2(0, 1, P);
    r.betab = TensorField2(0, 1, P);
    for (int A = 0; A < 2; ++A)
        for (std::size_t p = 0; p < P; ++p) {
            r.beta.comp[A][p] = -divch.comp[A][p] + 0.5 * gtr.comp[A][p] -
                                0.5 * (dch.comp[A][p] - 0.5 * c.trchi[j][p] * dif.comp[A][p]);
            r.betab.comp[A][p] = divcb.comp[A][p] - 0.5 * gtrb.comp[A][p] -
                                 0.5 * (dcb.comp[A][p] - 0.5 * c.trchib[j][p] * dif.comp[A][p]);
        }
    r.sigma = calc::curl(eta, geo).comp[0];
    Field de = calc::div(eta, geo).comp[0], deb = calc::div(etab, geo).comp[0];
    r.mu.resize(P);
    r.mub.resize(P);
    for (std::size_t p = 0; p < P; ++p) {
        r.mu[p] = -de[p] + c.K[j][p];
        r.mub[p] = -deb[p] + c.K[j][p];
    }
    return r;
}

}  // namespace hfl::cp
