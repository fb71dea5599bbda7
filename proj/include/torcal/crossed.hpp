#pragma once

#include <map>
#include <optional>

#include "torcal/json_io.hpp"
#include "torcal/symbol.hpp"

namespace torcal {

// Element of the smooth crossed product C^inf(T^n) x| G, band-limited in both
// variables.
//   finite cyclic: data[p] = value at generator^p, p in [0, order)
//   circle:        data[m] = coefficient function of e^{i m g}
// Haar measure is normalized to mass 1, so the finite-group unit is the
// element q.delta_e.
struct AlgebraElement {
    GroupDescriptor G;
    int dim = 1;
    std::map<long, TrigPolynomial> data;

    static AlgebraElement zero(const GroupDescriptor& G, int dim);
    static AlgebraElement unit(const GroupDescriptor& G, int dim);
    // f(x) embedded as a function supported at the identity
    static AlgebraElement embed(const GroupDescriptor& G, const TrigPolynomial& f);
    TrigPolynomial at(long key) const;
};

AlgebraElement algebra_add(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement algebra_scale(const AlgebraElement& a, const ExactScalar& c);
// (a*b)(x,g) = integral over h of a(x,h) b(h^{-1}x, h^{-1}g)
AlgebraElement convolve(const AlgebraElement& a, const AlgebraElement& b);
// phi*(x,g) = conj phi(g^{-1}x, g^{-1})
AlgebraElement involution(const AlgebraElement& a);
bool operator==(const AlgebraElement& a, const AlgebraElement& b);

// Band-limited finite-rank operator between mode/component slots:
// sum of weights w[(m,c),(k,e)] . e_{m,c} (x) <., e_{k,e}>.
struct FiniteRankOp {
    int dim = 1;
    int rank = 1;

    struct Key {
        ZVec out_mode;
        int out_comp = 0;
        ZVec in_mode;
        int in_comp = 0;
        friend bool operator<(const Key& a, const Key& b) {
            return std::tie(a.out_mode, a.out_comp, a.in_mode, a.in_comp) <
                   std::tie(b.out_mode, b.out_comp, b.in_mode, b.in_comp);
        }
        friend bool operator==(const Key& a, const Key& b) {
            return a.out_mode == b.out_mode && a.out_comp == b.out_comp &&
                   a.in_mode == b.in_mode && a.in_comp == b.in_comp;
        }
    };
    std::map<Key, ExactScalar> w;

    bool is_zero() const { return w.empty(); }
    void add(const Key& k, const ExactScalar& c);
};

FiniteRankOp rank_one(int dim, int rank, const ZVec& out_mode, int out_comp,
                      const ZVec& in_mode, int in_comp, const ExactScalar& weight);
FiniteRankOp finite_rank_add(const FiniteRankOp& a, const FiniteRankOp& b);
FiniteRankOp finite_rank_scale(const FiniteRankOp& a, const ExactScalar& c);
FiniteRankOp finite_rank_compose(const FiniteRankOp& a, const FiniteRankOp& b);
FiniteRankOp finite_rank_adjoint(const FiniteRankOp& a);
// Op(a) . f and f . Op(b); exact because f is band-limited
FiniteRankOp compose_symbol_rank(const MatrixSymbol& a, const FiniteRankOp& f);
FiniteRankOp compose_rank_symbol(const FiniteRankOp& f, const MatrixSymbol& b);
// conjugation by the translation/permutation operator of the map
FiniteRankOp finite_rank_pullback(const FiniteRankOp& f, const TorusMap& m);
ExactScalar finite_rank_trace(const FiniteRankOp& f);
bool operator==(const FiniteRankOp& a, const FiniteRankOp& b);

// One group slot of an operator family: a pseudodifferential symbol plus an
// optional band-limited smoothing part.  Opaque members carry only a support
// tag (enough for wavefront bookkeeping, nothing else).
struct FamilyMember {
    MatrixSymbol symbol;
    FiniteRankOp extra;
    bool opaque = false;
    std::optional<ConicRegion> support_tag;
};

// Group-indexed family of operators: represented operator is
//   Op(P) = integral over G of P(g) rho(g) dmu(g)
// with rho(g)s = s compose phi_g^{-1}.  Finite groups index members by
// generator power; circle families are indexed by g-Fourier mode and may in
// addition carry a delta_e member (applied with no group integration).
struct SymbolFamily {
    GroupDescriptor G;
    int dim = 1;
    int rank = 1;
    std::map<long, FamilyMember> members;
    std::optional<FamilyMember> delta;

    static SymbolFamily zero(const GroupDescriptor& G, int dim, int rank);
    static SymbolFamily unit(const GroupDescriptor& G, int dim, int rank);
    // B as the family carrying the measure-weighted identity slot: finite
    // groups store q.B at the identity, circle families store B as delta_e
    static SymbolFamily at_identity(const GroupDescriptor& G, const MatrixSymbol& b);
    static SymbolFamily at_identity(const GroupDescriptor& G, int dim, int rank,
                                    const FiniteRankOp& f);
};

// multiplication family: each phi(.,g) becomes an order-0 symbol
SymbolFamily lift_to_family(const AlgebraElement& a);

SymbolFamily family_add(const SymbolFamily& p, const SymbolFamily& q);
SymbolFamily family_scale(const SymbolFamily& p, const ExactScalar& c);
SymbolFamily family_negate(const SymbolFamily& p);
// (P*Q)(g) = integral over h of P(h) . C_h(Q(h^{-1}g)), where C_h conjugates
// by rho(h); member products use compose at `depth`
SymbolFamily family_convolve(const SymbolFamily& p, const SymbolFamily& q, int depth);
// adjoint of the represented operator, member-wise via faithfulness
SymbolFamily family_adjoint(const SymbolFamily& p, int depth);
bool operator==(const SymbolFamily& a, const SymbolFamily& b);

long family_order(const SymbolFamily& p);

// image of the elementary vector e_k in component `comp`
using ModeImage = std::map<std::pair<ZVec, int>, ExactScalar>;
ModeImage act_on_mode(const SymbolFamily& p, const ZVec& k, int comp);

// trace over the mode window |k|_inf <= R, computed through the twisted
// kernel diagonal and through mode sums; the two must agree
struct TraceReport {
    ExactScalar value;        // mode-sum route
    ExactScalar discrepancy;  // kernel route minus mode route
};
TraceReport family_trace(const SymbolFamily& p, long mode_cutoff);

// First-order operator with scalar square and declared grading.
struct DiracOperator {
    MatrixSymbol symbol;
    PolyhomogeneousSymbol absd;  // |xi|
    std::vector<int> grading;    // +1 / -1 per component

    static DiracOperator flat(int dim);  // dims 1 and 2
};

Json algebra_to_json(const AlgebraElement& a);
AlgebraElement algebra_from_json(const Json& j);
Json family_to_json(const SymbolFamily& p);
SymbolFamily family_from_json(const Json& j);

}  // namespace torcal
