#include "hfl/geometry.hpp"

#include <cmath>
#include <sstream>

#include "hfl/error.hpp"

namespace hfl {

namespace {

// d[A][i] = partial_A of metric component i (0:11, 1:12, 2:22).
struct MetricDerivs {
    std::array<std::array<Field, 3>, 2> d;
};

MetricDerivs metric_derivatives(const TensorField2& g, const Spectral2D& sp) {
    MetricDerivs m;
    const Field* c[3] = {&g.comp[0], &g.comp[1], &g.comp[3]};
    for (int i = 0; i < 3; ++i) {
        auto [a, b] = sp.gradient(*c[i]);
        m.d[0][i] = std::move(a);
        m.d[1][i] = std::move(b);
    }
    return m;
}

inline int sym_index(int A, int B) { return A + B; }

}  // namespace

TensorField2 christoffel(const TensorField2& gamma, const AngularGrid& chart) {
    require_positive_definite(gamma, chart);
    const Spectral2D& sp = Spectral2D::for_grid(chart);
    MetricDerivs md = metric_derivatives(gamma, sp);
    const std::size_t n = chart.size();
    TensorField2 G(1, 2, n);
    for (std::size_t p = 0; p < n; ++p) {
        Sym2 inv = sym_at(gamma, p).inverse();
        double gi[2][2] = {{inv.a, inv.b}, {inv.b, inv.d}};
        auto dg = [&](int A, int B, int C) { return md.d[A][sym_index(B, C)][p]; };
        for (int A = 0; A < 2; ++A)
            for (int B = A; B < 2; ++B) {
                double low[2];
                for (int D = 0; D < 2; ++D) low[D] = 0.5 * (dg(A, B, D) + dg(B, A, D) - dg(D, A, B));
                for (int C = 0; C < 2; ++C) {
                    double v = gi[C][0] * low[0] + gi[C][1] * low[1];
                    G.at({C, A, B})[p] = v;
                    G.at({C, B, A})[p] = v;
                }
            }
    }
    return G;
}

namespace {

// Ricci tensor R_BC of a 2-metric from its Christoffel symbols.
std::array<Field, 4> ricci2(const TensorField2& G, const Spectral2D& sp, std::size_t n) {
    // dG[A][C][B][E] = partial_A Gamma^C_BE
    std::array<std::array<std::array<std::array<Field, 2>, 2>, 2>, 2> dG;
    for (int C = 0; C < 2; ++C)
        for (int B = 0; B < 2; ++B)
            for (int E = B; E < 2; ++E) {
                auto [a, b] = sp.gradient(G.at({C, B, E}));
                dG[0][C][B][E] = a;
                dG[1][C][B][E] = b;
                if (E != B) {
                    dG[0][C][E][B] = std::move(a);
                    dG[1][C][E][B] = std::move(b);
                }
            }
    std::array<Field, 4> R;
    for (auto& r : R) r.assign(n, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        auto g = [&](int C, int A, int B) { return G.comp[(C << 2) | (A << 1) | B][p]; };
        for (int B = 0; B < 2; ++B)
            for (int C = 0; C < 2; ++C) {
                double v = 0.0;
                for (int A = 0; A < 2; ++A) {
                    v += dG[A][A][B][C][p] - dG[C][A][B][A][p];
                    for (int D = 0; D < 2; ++D) v += g(A, A, D) * g(D, B, C) - g(A, C, D) * g(D, B, A);
                }
                R[(B << 1) | C][p] = v;
            }
    }
    return R;
}

}  // namespace

GaussResult gauss_curvature(const TensorField2& gamma, const AngularGrid& chart, double tol) {
    TensorField2 G = christoffel(gamma, chart);
    const Spectral2D& sp = Spectral2D::for_grid(chart);
    const std::size_t n = chart.size();
    auto R = ricci2(G, sp, n);
    GaussResult out;
    out.K.resize(n);
    double scale = 1.0;
    for (std::size_t p = 0; p < n; ++p) {
        out.K[p] = R[0][p] / gamma.comp[0][p];
        out.crosscheck = std::max(out.crosscheck, std::abs(R[3][p] - out.K[p] * gamma.comp[3][p]));
        scale = std::max(scale, std::abs(R[3][p]));
    }
    if (out.crosscheck > tol * scale) {
        std::ostringstream os;
        os << "gauss_curvature: contraction mismatch " << out.crosscheck << " exceeds tolerance; chart too coarse";
        throw NumericalError(os.str());
    }
    return out;
}

SurfaceGeometry::SurfaceGeometry(const TensorField2& gamma, const AngularGrid& chart)
    : chart_(chart), sp_(&Spectral2D::for_grid(chart)), g_(gamma) {
    require_positive_definite(gamma, chart);
    const std::size_t n = chart.size();
    for (auto& f : inv_) f.resize(n);
    sqrtdet_.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        Sym2 m = sym_at(gamma, p);
        Sym2 i = m.inverse();
        inv_[0][p] = i.a;
        inv_[1][p] = i.b;
        inv_[2][p] = i.d;
        sqrtdet_[p] = std::sqrt(m.det());
    }
    G_ = christoffel(gamma, chart);
}

namespace calc {

namespace {
std::size_t npts(const SurfaceGeometry& geo) { return geo.size(); }
double eps_up(const SurfaceGeometry& geo, int A, int B, std::size_t p) {
    if (A == B) return 0.0;
    return A == 0 ? geo.eps_up(p) : -geo.eps_up(p);
}
double gam(const SurfaceGeometry& geo, int C, int A, int B, std::size_t p) {
    return geo.gamma_symbols().comp[(C << 2) | (A << 1) | B][p];
}
}  // namespace

TensorField2 grad(const TensorField2& f, const SurfaceGeometry& geo) {
    require_rank(f, 0, 0, "grad");
    auto [a, b] = geo.spectral().gradient(f.comp[0]);
    return TensorField2::one_form(std::move(a), std::move(b));
}

TensorField2 covariant(const TensorField2& phi, const SurfaceGeometry& geo) {
    const std::size_t n = npts(geo);
    if (phi.contra != 0 || phi.cov < 0 || phi.cov > 2) throw UsageError("covariant: covariant rank 0..2 required");
    if (phi.cov == 0) return grad(phi, geo);
    const int r = phi.cov;
    TensorField2 out(0, r + 1, n);
    std::vector<std::pair<Field, Field>> d(phi.ncomp());
    for (std::size_t c = 0; c < phi.ncomp(); ++c) d[c] = geo.spectral().gradient(phi.comp[c]);
    for (std::size_t c = 0; c < phi.ncomp(); ++c) {
        for (int A = 0; A < 2; ++A) {
            Field& o = out.comp[(static_cast<std::size_t>(A) << r) | c];
            const Field& dd = A == 0 ? d[c].first : d[c].second;
            for (std::size_t p = 0; p < n; ++p) {
                double v = dd[p];
                if (r == 1) {
                    int B = static_cast<int>(c);
                    for (int C = 0; C < 2; ++C) v -= gam(geo, C, A, B, p) * phi.comp[C][p];
                } else {
                    int B = static_cast<int>(c >> 1), Cs = static_cast<int>(c & 1);
                    for (int D = 0; D < 2; ++D) {
                        v -= gam(geo, D, A, B, p) * phi.comp[(D << 1) | Cs][p];
                        v -= gam(geo, D, A, Cs, p) * phi.comp[(B << 1) | D][p];
                    }
                }
                o[p] = v;
            }
        }
    }
    return out;
}

TensorField2 div(const TensorField2& phi, const SurfaceGeometry& geo) {
    const std::size_t n = npts(geo);
    if (phi.contra != 0 || (phi.cov != 1 && phi.cov != 2)) throw UsageError("div: 1-form or covariant 2-tensor required");
    TensorField2 nab = covariant(phi, geo);
    if (phi.cov == 1) {
        Field s(n);
        for (std::size_t p = 0; p < n; ++p) {
            double v = 0.0;
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B) v += geo.inv(A, B)[p] * nab.comp[(A << 1) | B][p];
            s[p] = v;
        }
        return TensorField2::scalar(std::move(s));
    }
    TensorField2 out(0, 1, n);
    for (std::size_t p = 0; p < n; ++p)
        for (int A = 0; A < 2; ++A) {
            double v = 0.0;
            for (int B = 0; B < 2; ++B)
                for (int C = 0; C < 2; ++C) v += geo.inv(B, C)[p] * nab.comp[(B << 2) | (C << 1) | A][p];
            out.comp[A][p] = v;
        }
    return out;
}

TensorField2 curl(const TensorField2& phi, const SurfaceGeometry& geo) {
    const std::size_t n = npts(geo);
    if (phi.contra != 0 || (phi.cov != 1 && phi.cov != 2)) throw UsageError("curl: 1-form or covariant 2-tensor required");
    TensorField2 nab = covariant(phi, geo);
    if (phi.cov == 1) {
        Field s(n);
        for (std::size_t p = 0; p < n; ++p) s[p] = geo.eps_up(p) * (nab.comp[1][p] - nab.comp[2][p]);
        return TensorField2::scalar(std::move(s));
    }
    TensorField2 out(0, 1, n);
    for (std::size_t p = 0; p < n; ++p)
        for (int A = 0; A < 2; ++A) {
            double v = 0.0;
            for (int B = 0; B < 2; ++B)
                for (int C = 0; C < 2; ++C) v += eps_up(geo, B, C, p) * nab.comp[(B << 2) | (C << 1) | A][p];
            out.comp[A][p] = v;
        }
    return out;
}

TensorField2 trace(const TensorField2& phi, const SurfaceGeometry& geo) {
    require_rank(phi, 0, 2, "trace");
    const std::size_t n = npts(geo);
    Field s(n);
    for (std::size_t p = 0; p < n; ++p) {
        double v = 0.0;
        for (int A = 0; A < 2; ++A)
            for (int B = 0; B < 2; ++B) v += geo.inv(A, B)[p] * phi.comp[(A << 1) | B][p];
        s[p] = v;
    }
    return TensorField2::scalar(std::move(s));
}

TensorField2 tracefree(const TensorField2& phi, const SurfaceGeometry& geo) {
    TensorField2 tr = trace(phi, geo);
    TensorField2 out = phi;
    const auto& g = geo.metric();
    for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t p = 0; p < npts(geo); ++p) out.comp[c][p] = phi.comp[c][p] - 0.5 * tr.comp[0][p] * g.comp[c][p];
    return out;
}

TensorField2 nabla_otimes(const TensorField2& phi, const SurfaceGeometry& geo) {
    require_rank(phi, 0, 1, "nabla_otimes");
    TensorField2 nab = covariant(phi, geo);
    TensorField2 dv = div(phi, geo);
    const auto& g = geo.metric();
    TensorField2 out(0, 2, npts(geo), true);
    for (int A = 0; A < 2; ++A)
        for (int B = 0; B < 2; ++B)
            for (std::size_t p = 0; p < npts(geo); ++p)
                out.comp[(A << 1) | B][p] = nab.comp[(A << 1) | B][p] + nab.comp[(B << 1) | A][p] -
                                            g.comp[(A << 1) | B][p] * dv.comp[0][p];
    return out;
}

TensorField2 hodge(const TensorField2& phi, const SurfaceGeometry& geo) {
    require_rank(phi, 0, 1, "hodge");
    const auto& g = geo.metric();
    TensorField2 out(0, 1, npts(geo));
    for (std::size_t p = 0; p < npts(geo); ++p)
        for (int A = 0; A < 2; ++A) {
            double v = 0.0;
            for (int C = 0; C < 2; ++C)
                for (int B = 0; B < 2; ++B) v += g.comp[(A << 1) | C][p] * eps_up(geo, C, B, p) * phi.comp[B][p];
            out.comp[A][p] = v;
        }
    return out;
}

TensorField2 raise(const TensorField2& phi, const SurfaceGeometry& geo) {
    require_rank(phi, 0, 1, "raise");
    TensorField2 out(1, 0, npts(geo));
    for (std::size_t p = 0; p < npts(geo); ++p)
        for (int A = 0; A < 2; ++A) out.comp[A][p] = geo.inv(A, 0)[p] * phi.comp[0][p] + geo.inv(A, 1)[p] * phi.comp[1][p];
    return out;
}

TensorField2 mixed(const TensorField2& chi, const SurfaceGeometry& geo) {
    require_rank(chi, 0, 2, "mixed");
    TensorField2 out(1, 1, npts(geo));
    for (std::size_t p = 0; p < npts(geo); ++p)
        for (int A = 0; A < 2; ++A)
            for (int B = 0; B < 2; ++B)
                out.comp[(A << 1) | B][p] =
                    geo.inv(A, 0)[p] * chi.comp[(0 << 1) | B][p] + geo.inv(A, 1)[p] * chi.comp[(1 << 1) | B][p];
    return out;
}

TensorField2 dot(const TensorField2& phi, const TensorField2& psi, const SurfaceGeometry& geo) {
    const std::size_t n = npts(geo);
    if (phi.contra != 0 || psi.contra != 0) throw UsageError("dot: covariant arguments required");
    if (phi.cov == 1 && psi.cov == 2) return dot(psi, phi, geo);
    Field s;
    if (phi.cov == 1 && psi.cov == 1) {
        s.resize(n);
        for (std::size_t p = 0; p < n; ++p) {
            double v = 0.0;
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B) v += geo.inv(A, B)[p] * phi.comp[A][p] * psi.comp[B][p];
            s[p] = v;
        }
        return TensorField2::scalar(std::move(s));
    }
    if (phi.cov == 2 && psi.cov == 2) {
        s.resize(n);
        for (std::size_t p = 0; p < n; ++p) {
            double v = 0.0;
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B)
                    for (int C = 0; C < 2; ++C)
                        for (int D = 0; D < 2; ++D)
                            v += geo.inv(A, C)[p] * geo.inv(B, D)[p] * phi.comp[(A << 1) | B][p] *
                                 psi.comp[(C << 1) | D][p];
            s[p] = v;
        }
        return TensorField2::scalar(std::move(s));
    }
    if (phi.cov == 2 && psi.cov == 1) {
        TensorField2 out(0, 1, n);
        for (std::size_t p = 0; p < n; ++p)
            for (int A = 0; A < 2; ++A) {
                double v = 0.0;
                for (int B = 0; B < 2; ++B)
                    for (int C = 0; C < 2; ++C) v += geo.inv(B, C)[p] * phi.comp[(A << 1) | B][p] * psi.comp[C][p];
                out.comp[A][p] = v;
            }
        return out;
    }
    throw UsageError("dot: unsupported rank combination");
}

TensorField2 hat_otimes(const TensorField2& phi, const TensorField2& psi, const SurfaceGeometry& geo) {
    require_rank(phi, 0, 1, "hat_otimes");
    require_rank(psi, 0, 1, "hat_otimes");
    TensorField2 d = dot(phi, psi, geo);
    const auto& g = geo.metric();
    TensorField2 out(0, 2, npts(geo), true);
    for (int A = 0; A < 2; ++A)
        for (int B = 0; B < 2; ++B)
            for (std::size_t p = 0; p < npts(geo); ++p)
                out.comp[(A << 1) | B][p] = phi.comp[A][p] * psi.comp[B][p] + phi.comp[B][p] * psi.comp[A][p] -
                                            g.comp[(A << 1) | B][p] * d.comp[0][p];
    return out;
}

TensorField2 wedge(const TensorField2& phi, const TensorField2& psi, const SurfaceGeometry& geo) {
    const std::size_t n = npts(geo);
    Field s(n);
    if (phi.contra == 0 && psi.contra == 0 && phi.cov == 1 && psi.cov == 1) {
        for (std::size_t p = 0; p < n; ++p) s[p] = geo.eps_up(p) * (phi.comp[0][p] * psi.comp[1][p] - phi.comp[1][p] * psi.comp[0][p]);
        return TensorField2::scalar(std::move(s));
    }
    if (phi.contra == 0 && psi.contra == 0 && phi.cov == 2 && psi.cov == 2) {
        for (std::size_t p = 0; p < n; ++p) {
            double v = 0.0;
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B) {
                    double e = eps_up(geo, A, B, p);
                    if (e == 0.0) continue;
                    for (int C = 0; C < 2; ++C)
                        for (int D = 0; D < 2; ++D)
                            v += e * geo.inv(C, D)[p] * phi.comp[(A << 1) | C][p] * psi.comp[(B << 1) | D][p];
                }
            s[p] = v;
        }
        return TensorField2::scalar(std::move(s));
    }
    throw UsageError("wedge: two 1-forms or two covariant 2-tensors required");
}

TensorField2 add(const TensorField2& x, const TensorField2& y, double a, double b) {
    if (x.contra != y.contra || x.cov != y.cov) throw UsageError("add: rank mismatch");
    TensorField2 out = x;
    for (std::size_t c = 0; c < x.ncomp(); ++c)
        for (std::size_t p = 0; p < x.npts; ++p) out.comp[c][p] = a * x.comp[c][p] + b * y.comp[c][p];
    out.symmetric = x.symmetric && y.symmetric;
    return out;
}

TensorField2 scale(const TensorField2& x, std::span<const double> s) {
    TensorField2 out = x;
    for (auto& c : out.comp)
        for (std::size_t p = 0; p < x.npts; ++p) c[p] *= s[p];
    return out;
}

}  // namespace calc

TensorField2 angular_calculus(const std::string& op, const TensorField2& a, const TensorField2* b,
                              const SurfaceGeometry& geo) {
    auto need_b = [&]() -> const TensorField2& {
        if (!b) throw UsageError(op + ": second argument required");
        return *b;
    };
    if (op == "grad") return calc::grad(a, geo);
    if (op == "div") return calc::div(a, geo);
    if (op == "curl") return calc::curl(a, geo);
    if (op == "nabla_otimes") return calc::nabla_otimes(a, geo);
    if (op == "trace") return calc::trace(a, geo);
    if (op == "tracefree") return calc::tracefree(a, geo);
    if (op == "hodge") return calc::hodge(a, geo);
    if (op == "raise") return calc::raise(a, geo);
    if (op == "dot") return calc::dot(a, need_b(), geo);
    if (op == "hat_otimes") return calc::hat_otimes(a, need_b(), geo);
    if (op == "wedge") return calc::wedge(a, need_b(), geo);
    throw UsageError("angular_calculus: unknown operator " + op);
}

}  // namespace hfl
