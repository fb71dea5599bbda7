#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "torcal/json_io.hpp"
#include "torcal/real.hpp"
#include "torcal/symbol.hpp"

namespace torcal {

// Per-mode weight: an optional band table read off one lattice axis times an
// optional power of the eigenvalue.  Power exponents must be nonpositive so
// that weighted traces keep the plain trace's convergence window.
struct WeightSpec {
    struct Character {
        int axis = 0;
        std::map<long, Rational> coef;
    };
    std::optional<Character> character;
    std::optional<Rational> power;
};

struct EigenEntry {
    ZVec mode;
    int comp = 0;
    Real lambda;
    Real weight;
};

// Eigenvalues of an x-independent symbol over the lattice ball |k| <= radius,
// plus enough growth data to bound every truncated tail:
//   lambda >= growth_floor * |k|^growth_degree  on and beyond the outer shell.
struct EigenLattice {
    int dim = 1;
    long radius = 0;
    long growth_degree = 2;
    Real growth_floor;
    int tail_dim = 1;      // dimension of the sublattice still infinite past the ball
    long tail_sheets = 1;  // number of affine sheets carrying nonzero weight
    Real char_bound;       // bound on the band-table factor of the weight
    Rational weight_power; // eigenvalue exponent folded into the weights (<= 0)
    std::vector<EigenEntry> entries;
};

EigenLattice eigendata(const MatrixSymbol& p, long radius, const WeightSpec& w = {},
                       bool drop_kernel = false);

// Trace values carry a rigorous bound on the discarded tail of the mode sum.
struct TraceValue {
    Real value;
    Real tail_bound;
};

TraceValue heat_trace(const EigenLattice& e, const Real& t);
TraceValue zeta_trace(const EigenLattice& e, const Real& z);
TraceValue resolvent_trace(const EigenLattice& e, int power, const Real& lambda);

// One expansion term: coeff * t^{-s} log^q t (heat), a Laurent coefficient
// coeff / (z - s)^{q+1} of Gamma(z) * zeta(z) (zeta), or coeff * mu^{-s} log^q mu
// with mu = -lambda (resolvent).
struct ExpansionTerm {
    Rational s;
    int logpow = 0;
    Real coeff;
};

struct AsymptoticExpansion {
    enum class Kind { heat, zeta, resolvent };
    Kind kind = Kind::heat;
    int resolvent_power = 0;
    std::vector<ExpansionTerm> terms;
};

struct FitReport {
    AsymptoticExpansion expansion;
    Real condition;
    Real residual;
    Real drift; // coefficient movement when the deepest template term is dropped
};

FitReport fit_expansion(const std::vector<std::pair<Real, Real>>& samples,
                        const std::vector<std::pair<Rational, int>>& tmpl,
                        AsymptoticExpansion::Kind kind);

AsymptoticExpansion expansion_transform(const AsymptoticExpansion& e,
                                        AsymptoticExpansion::Kind to,
                                        int resolvent_power = 0);

// Integral of xi^alpha over the unit sphere in R^n, as an exact pi-graded constant.
ExactConstant sphere_monomial_integral(const ZVec& alpha, int n);

// Sphere-and-torus integral of the degree -n slice of the diagonal.
ExactConstant wodzicki_residue(const MatrixSymbol& a);

// Regularized trace ladder read off the zeta-kind Laurent data at z = 0.
// Row -1 (the regular value) is present only when no pole was detected.
struct TauTable {
    std::map<long, Real> tau;
    bool zero_is_pole = false;
};

TauTable tau_functionals(const AsymptoticExpansion& e, int max_order,
                         const Real& pole_tol = Real("1e-8"));

struct WeylCount {
    Real count;
    Real coefficient; // count / t^{m/g}, m the orbit-space dimension
};

WeylCount weyl_count(const EigenLattice& e, const Real& t, const GroupDescriptor& g);

// Logarithmic Cesaro estimate of a Dixmier-type limit for a positive sequence.
struct DixmierReport {
    Real estimate;
    Real sigma_full;
    Real sigma_half;
    Real decay_ratio;
};

DixmierReport dixmier_estimate(std::vector<Real> mu);
DixmierReport dixmier_estimate(const EigenLattice& e, const WeightSpec& w);

Json expansion_to_json(const AsymptoticExpansion& e);
AsymptoticExpansion expansion_from_json(const Json& j);

} // namespace torcal
