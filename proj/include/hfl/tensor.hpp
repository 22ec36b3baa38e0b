#pragma once

#include <array>
#include <initializer_list>
#include <vector>

#include "hfl/grid.hpp"

namespace hfl {

// Tensor field on the angular chart. Slots are ordered contravariant first,
// then covariant; component index is the binary number formed by the slot
// values (0 or 1), most significant slot first.
struct TensorField2 {
    int contra = 0;
    int cov = 0;
    bool symmetric = false;
    std::size_t npts = 0;
    std::vector<Field> comp;

    TensorField2() = default;
    TensorField2(int contra_, int cov_, std::size_t npts_, bool symmetric_ = false);

    int rank() const { return contra + cov; }
    std::size_t ncomp() const { return comp.size(); }
    Field& at(std::initializer_list<int> slots);
    const Field& at(std::initializer_list<int> slots) const;
    double& operator()(std::initializer_list<int> slots, std::size_t p) { return at(slots)[p]; }
    double operator()(std::initializer_list<int> slots, std::size_t p) const { return at(slots)[p]; }

    static TensorField2 scalar(Field f);
    static TensorField2 one_form(Field f1, Field f2);
    static TensorField2 vector(Field v1, Field v2);
    // Symmetric covariant 2-tensor from (11, 12, 22).
    static TensorField2 sym2(Field g11, Field g12, Field g22);
};

// Pointwise view of a symmetric 2x2 matrix.
struct Sym2 {
    double a, b, d;  // [[a, b], [b, d]]
    double det() const { return a * d - b * b; }
    Sym2 inverse() const {
        double D = det();
        return {d / D, -b / D, a / D};
    }
};

inline Sym2 sym_at(const TensorField2& g, std::size_t p) {
    return {g.comp[0][p], g.comp[1][p], g.comp[3][p]};
}

void require_rank(const TensorField2& t, int contra, int cov, const char* op);
// Checks det > 0 and g11 > 0 at every point; throws with the first failure.
void require_positive_definite(const TensorField2& g, const AngularGrid& chart);

// Symmetric (2,0)-covariant field stored as three scalar fields.
struct SymField {
    Field a, b, d;
    TensorField2 tensor() const { return TensorField2::sym2(a, b, d); }
};

}  // namespace hfl
