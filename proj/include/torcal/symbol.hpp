#pragma once

#include <map>
#include <optional>
#include <vector>

#include "torcal/cone.hpp"
#include "torcal/trig.hpp"

namespace torcal {

// Laurent polynomial in xi_1..xi_n (exponents may be negative).
using LaurentPoly = std::map<ZVec, ExactScalar>;

LaurentPoly laurent_zero();
LaurentPoly laurent_monomial(const ZVec& alpha, const ExactScalar& c);
bool laurent_is_zero(const LaurentPoly& p);
void laurent_accumulate(LaurentPoly& into, const LaurentPoly& p, const ExactScalar& scale);
LaurentPoly laurent_add(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly laurent_scale(const LaurentPoly& a, const ExactScalar& c);
LaurentPoly laurent_mul(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly laurent_mul_monomial(const LaurentPoly& a, const ZVec& alpha, const ExactScalar& c);
LaurentPoly laurent_derivative(const LaurentPoly& a, int axis);
LaurentPoly laurent_conj(const LaurentPoly& a);
// sum of squares of the coordinates, |xi|^2
LaurentPoly laurent_norm2(int dim);
// exact division by |xi|^2; returns nothing when not divisible
std::optional<LaurentPoly> laurent_divide_norm2(const LaurentPoly& a, int dim);
ExactScalar laurent_eval(const LaurentPoly& a, const ZVec& k);

// One homogeneous xi-dependence in canonical form
//   (L(xi) + M(xi) |xi|) |xi|^{-2J},
// with L, M homogeneous Laurent polynomials and J minimal (J = 0 when both
// vanish; L and M never both divisible by |xi|^2 while J > 0).  For a term of
// homogeneity d the monomials of L have weight d + 2J, those of M have weight
// d + 2J - 1.
struct XiPart {
    int J = 0;
    LaurentPoly L;
    LaurentPoly M;
};

bool xipart_is_zero(const XiPart& p);
void xipart_reduce(XiPart& p, int dim);
XiPart xipart_add(const XiPart& a, const XiPart& b, int dim);
XiPart xipart_scale(const XiPart& a, const ExactScalar& c);
XiPart xipart_mul(const XiPart& a, const XiPart& b, int dim);
XiPart xipart_derivative(const XiPart& a, int axis, int dim);
XiPart xipart_conj(const XiPart& a);
// multiply by |xi|^m (m may be negative)
XiPart xipart_mul_norm_power(const XiPart& a, long m, int dim);
// reciprocal; requires L^2 - M^2 |xi|^2 to be a single monomial
XiPart xipart_inverse(const XiPart& a, int dim);
bool operator==(const XiPart& a, const XiPart& b);

// exact value at a lattice covector; throws ExactDomainError when the value
// is singular (division by zero) or leaves Q(i) (|k| irrational with M != 0)
ExactScalar xipart_eval(const XiPart& p, const ZVec& k, int dim);

// Single x-mode times a xi-part, optionally gated by a cutoff cone.  The
// cutoff is treated as exactly homogeneous: derivatives ignore it and
// products intersect the cones.
struct Atom {
    ZVec xmode;
    std::optional<ConicRegion> marker;
    XiPart xi;
};

// Finite polyhomogeneous expansion: terms by homogeneity degree, descending.
// `order` bounds the top degree.  Degrees at or below `tail` are untracked
// (asymptotic truncation); a missing tail means the expansion is exact.
struct PolyhomogeneousSymbol {
    int dim = 1;
    long order = 0;
    std::optional<long> tail;
    std::map<long, std::vector<Atom>, std::greater<long>> terms;

    static PolyhomogeneousSymbol zero(int dim);
    static PolyhomogeneousSymbol constant(int dim, const ExactScalar& c);
    static PolyhomogeneousSymbol from_trig(int dim, const TrigPolynomial& f);
    static PolyhomogeneousSymbol from_xipart(int dim, long degree, const XiPart& p);
    // c |xi|^m as an exact symbol of order m
    static PolyhomogeneousSymbol norm_power(int dim, long m);

    bool is_zero() const;
    // true when every retained term vanishes and the expansion is exact
    bool is_exactly_zero() const { return is_zero() && !tail.has_value(); }
};

// merge duplicate atoms, drop zeros and terms in the untracked range
void symbol_normalize(PolyhomogeneousSymbol& s);
PolyhomogeneousSymbol symbol_add(const PolyhomogeneousSymbol& a, const PolyhomogeneousSymbol& b);
PolyhomogeneousSymbol symbol_scale(const PolyhomogeneousSymbol& a, const ExactScalar& c);
PolyhomogeneousSymbol symbol_negate(const PolyhomogeneousSymbol& a);
// pointwise product of the expansions
PolyhomogeneousSymbol symbol_mul(const PolyhomogeneousSymbol& a, const PolyhomogeneousSymbol& b);
PolyhomogeneousSymbol symbol_mul_trig(const PolyhomogeneousSymbol& a, const TrigPolynomial& f);
// apply a cutoff cone to every atom
PolyhomogeneousSymbol symbol_apply_marker(const PolyhomogeneousSymbol& a, const ConicRegion& c);
PolyhomogeneousSymbol symbol_derivative_x(const PolyhomogeneousSymbol& a, int axis);
PolyhomogeneousSymbol symbol_derivative_xi(const PolyhomogeneousSymbol& a, int axis);
PolyhomogeneousSymbol symbol_conj(const PolyhomogeneousSymbol& a);
// pull back along x -> U x + v (U integer columns, v in units of 2 pi);
// covectors move by the inverse transpose of U
PolyhomogeneousSymbol symbol_pullback(const PolyhomogeneousSymbol& a, const TorusMap& map);

// composition of operators: c(x,xi) ~ sum_alpha d_xi^alpha a . D_x^alpha b / alpha!,
// keeping `depth` homogeneity levels below the nominal top order
PolyhomogeneousSymbol symbol_compose(const PolyhomogeneousSymbol& a,
                                     const PolyhomogeneousSymbol& b, int depth);
// formal adjoint: sum_alpha d_xi^alpha D_x^alpha conj(a) / alpha!
PolyhomogeneousSymbol symbol_adjoint(const PolyhomogeneousSymbol& a, int depth);

// Op(a) e_k = sum_l a_l(k) e_{k+l}; exact, throws ExactDomainError when some
// retained atom cannot be evaluated exactly at k.  Untracked tails are
// ignored (the caller sees the finite part).
TrigPolynomial symbol_apply_to_mode(const PolyhomogeneousSymbol& a, const ZVec& k);

// directions where some retained term survives marker cancellation; cells of
// the marker arrangement are tested separately so (1 - cutoff) * a reports
// only the complement
ConicRegion symbol_essential_support(const PolyhomogeneousSymbol& a);

// retained-window equality (same terms, same tail)
bool operator==(const PolyhomogeneousSymbol& a, const PolyhomogeneousSymbol& b);

// principal-part reciprocal: the top term must be a single atom with an
// invertible xi-part; the result has order -a.order and keeps the marker
PolyhomogeneousSymbol symbol_invert_principal(const PolyhomogeneousSymbol& a);

// Square matrix of symbols sharing one dimension (entries row-major).
struct MatrixSymbol {
    int size = 1;
    int dim = 1;
    std::vector<PolyhomogeneousSymbol> entries;

    static MatrixSymbol identity(int size, int dim);
    static MatrixSymbol zero_matrix(int size, int dim);
    const PolyhomogeneousSymbol& at(int r, int c) const;
    PolyhomogeneousSymbol& at(int r, int c);
};

MatrixSymbol matrix_add(const MatrixSymbol& a, const MatrixSymbol& b);
MatrixSymbol matrix_negate(const MatrixSymbol& a);
// entrywise operator composition at the given depth
MatrixSymbol matrix_compose(const MatrixSymbol& a, const MatrixSymbol& b, int depth);
MatrixSymbol matrix_adjoint(const MatrixSymbol& a, int depth);
bool operator==(const MatrixSymbol& a, const MatrixSymbol& b);

}  // namespace torcal
