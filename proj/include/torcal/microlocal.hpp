#pragma once

#include <variant>
#include <vector>

#include "torcal/crossed.hpp"

namespace torcal {

// One graph component of an operator wavefront relation:
//   {(g_* xi, xi) : xi in cone}.
struct GraphPiece {
    GroupElement g;
    ConicRegion cone;
};

// Conic relation on covectors with explicit zero-section components.
// Pairs are written (output, input); zero_in holds outputs paired with the
// zero section on the input side, zero_out holds inputs paired with zero on
// the output side.
struct WavefrontRelation {
    int dim = 1;
    std::vector<GraphPiece> pieces;
    ConicRegion zero_in = ConicRegion::empty(1);
    ConicRegion zero_out = ConicRegion::empty(1);

    static WavefrontRelation empty_relation(int dim);
    static WavefrontRelation diagonal(int dim, const ConicRegion& cone);
    bool is_empty() const;
};

// merge pieces sharing a group element, drop empty cones
void relation_normalize(const GroupDescriptor& G, WavefrontRelation& r);
bool relation_equal(const GroupDescriptor& G, const WavefrontRelation& a,
                    const WavefrontRelation& b);

struct ComposedRelation {
    WavefrontRelation rel;
    // set when both factors carry zero-section components that would pair a
    // nonzero output with a nonzero input; such a product is outside the
    // graph-piece form and the composition theorem's hypothesis fails
    bool projection_clash = false;
};
ComposedRelation compose_relations(const GroupDescriptor& G, const WavefrontRelation& r1,
                                   const WavefrontRelation& r2);

// maps along which conic sets push forward
struct ProjectionAxes {
    std::vector<int> keep;  // strictly increasing source axes kept by the projection
};
struct PointInclusion {
    int target_dim = 1;  // inclusion of a point into T^target_dim
};
using MapDescriptor = std::variant<TorusMap, ProjectionAxes, PointInclusion>;

// Covector image of a conic set, including the zero-pullback branch of the
// definition: directions whose pullback lands in the zero section are always
// in the image (so a point inclusion maps even the empty set to a full fiber).
ConicRegion pushforward_region(const MapDescriptor& f, const ConicRegion& s);

// Wavefront bound of the represented operator of a family: one graph piece
// per supported group element, with cone Ess(P(g)) cut to the transversal
// cotangent region on both sides of the graph.  Member support comes from the
// support_tag when present and the computed essential support of the symbol
// otherwise; opaque members without a tag are an error.
WavefrontRelation family_wavefront(const SymbolFamily& p);

struct SymbolClass {
    bool elliptic = false;
    bool transversally_elliptic = false;
    bool transversally_smoothing = false;
    ConicRegion char_cone = ConicRegion::empty(1);
};

// Exact classification of the principal part.  Supported shapes: diagonal
// matrices and two-by-two matrices with vanishing diagonal; per marker cell
// the active x-independent top-degree sum must be a monomial, a pair of
// first-power axis terms, or a same-sign all-even-exponent polynomial.
// Anything else throws (refine the symbol or use the numeric route).
SymbolClass classify_symbol(const MatrixSymbol& p, const GroupDescriptor& G);

// Family classification: transversal smoothing is decided from member
// support; ellipticity fields are certified only when every member away from
// the identity slot is itself transversally smoothing, and full ellipticity
// only when no such member exists at all.
SymbolClass classify_family(const SymbolFamily& p);

Json relation_to_json(const WavefrontRelation& r);
WavefrontRelation relation_from_json(const Json& j);

}  // namespace torcal
