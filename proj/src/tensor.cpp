#include "hfl/tensor.hpp"

#include <sstream>

#include "hfl/error.hpp"

namespace hfl {

TensorField2::TensorField2(int contra_, int cov_, std::size_t npts_, bool symmetric_)
    : contra(contra_), cov(cov_), symmetric(symmetric_), npts(npts_) {
    comp.assign(std::size_t{1} << (contra + cov), Field(npts, 0.0));
}

Field& TensorField2::at(std::initializer_list<int> slots) {
    if (static_cast<int>(slots.size()) != rank()) throw UsageError("TensorField2::at: wrong slot count");
    std::size_t idx = 0;
    for (int s : slots) idx = (idx << 1) | static_cast<std::size_t>(s);
    return comp[idx];
}

const Field& TensorField2::at(std::initializer_list<int> slots) const {
    return const_cast<TensorField2*>(this)->at(slots);
}

TensorField2 TensorField2::scalar(Field f) {
    TensorField2 t(0, 0, f.size());
    t.comp[0] = std::move(f);
    return t;
}

TensorField2 TensorField2::one_form(Field f1, Field f2) {
    TensorField2 t(0, 1, f1.size());
    t.comp[0] = std::move(f1);
    t.comp[1] = std::move(f2);
    return t;
}

TensorField2 TensorField2::vector(Field v1, Field v2) {
    TensorField2 t(1, 0, v1.size());
    t.comp[0] = std::move(v1);
    t.comp[1] = std::move(v2);
    return t;
}

TensorField2 TensorField2::sym2(Field g11, Field g12, Field g22) {
    TensorField2 t(0, 2, g11.size(), true);
    t.comp[0] = std::move(g11);
    t.comp[1] = g12;
    t.comp[2] = std::move(g12);
    t.comp[3] = std::move(g22);
    return t;
}

void require_rank(const TensorField2& t, int contra, int cov, const char* op) {
    if (t.contra != contra || t.cov != cov) {
        std::ostringstream os;
        os << op << ": expected rank (" << contra << " up, " << cov << " down), got (" << t.contra << ", " << t.cov
           << ")";
        throw UsageError(os.str());
    }
}

void require_positive_definite(const TensorField2& g, const AngularGrid& chart) {
    require_rank(g, 0, 2, "metric");
    for (std::size_t p = 0; p < g.npts; ++p) {
        Sym2 m = sym_at(g, p);
        if (!(m.det() > 0.0) || !(m.a > 0.0)) {
            std::size_t i1 = p / chart.n2, i2 = p % chart.n2;
            std::ostringstream os;
            os << "metric not positive definite at grid point (" << i1 << ", " << i2 << ")";
            throw NumericalError(os.str(), chart.theta1(i1), static_cast<long>(p));
        }
    }
}

}  // namespace hfl
