#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "torcal/zvec.hpp"

namespace torcal {

// Primitive integer direction on the circle of rays.
struct Dir {
    long x = 1, y = 0;

    friend bool operator==(const Dir& a, const Dir& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(const Dir& a, const Dir& b) { return !(a == b); }
};

Dir dir_normalize(long x, long y);  // divide by gcd; (0,0) throws
long dir_cross(const Dir& a, const Dir& b);
// strict total order counterclockwise starting at +x axis
bool dir_less(const Dir& a, const Dir& b);

// Closed arc of directions, counterclockwise lo -> hi (lo == hi: single ray).
struct Arc {
    Dir lo, hi;
    friend bool operator==(const Arc& a, const Arc& b) { return a.lo == b.lo && a.hi == b.hi; }
};

// Closed conic subset of R^n minus origin, exact.
//  dim 1: subset of the two half-lines.
//  dim 2: finite union of closed angular sectors (canonical, disjoint).
//  dim >= 3: only empty / full / coordinate subspaces (enough for the
//            transversal-cotangent bookkeeping); geometric ops outside this
//            fragment throw.
class ConicRegion {
  public:
    ConicRegion() = default;

    static ConicRegion empty(int dim);
    static ConicRegion full(int dim);
    // {xi : xi_j = 0 for j in zero_axes} minus origin
    static ConicRegion coordinate_subspace(int dim, const std::vector<int>& zero_axes);
    // dim 1 helper: which of the two rays are present
    static ConicRegion half_lines(bool plus, bool minus);
    // dim 2 sector from ray lo counterclockwise to ray hi (closed)
    static ConicRegion sector(const Dir& lo, const Dir& hi);
    static ConicRegion ray(int dim, const ZVec& direction);

    int dim() const { return dim_; }
    bool is_empty() const;
    bool is_full() const;

    ConicRegion intersect(const ConicRegion& o) const;
    ConicRegion unite(const ConicRegion& o) const;
    // closure of the complement
    ConicRegion complement_closure() const;
    bool contains(const ConicRegion& o) const;  // o subseteq this
    friend bool operator==(const ConicRegion& a, const ConicRegion& b);

    // membership of a lattice covector; k == 0 belongs only to the full region
    bool contains_lattice(const ZVec& k) const;

    // image under an invertible integer matrix (columns), |det| = 1
    ConicRegion linear_image(const std::vector<ZVec>& cols) const;

    // convex pieces for serialization: each piece as {rays, inward normals};
    // a full region reports a single piece with empty rays/normals.
    struct ConvexPiece {
        std::vector<ZVec> rays;
        std::vector<ZVec> normals;
    };
    std::vector<ConvexPiece> convex_pieces() const;
    static ConicRegion from_pieces(int dim, const std::vector<ConvexPiece>& pieces);

    // canonical text key (for deterministic sorting/uniquing)
    std::string key() const;

  private:
    int dim_ = 2;
    // dim 1
    bool ray_plus_ = false, ray_minus_ = false;
    // dim 2
    bool full_ = false;
    std::vector<Arc> arcs_;
    // dim >= 3 fragment: full_ flag or subspace axes (sorted); empty when none
    std::vector<int> zero_axes_;
    bool high_dim_empty_ = true;

    void normalize2();
};

// --- group actions on the torus -------------------------------------------

// Finite cyclic group Z/q acting by a translation (components as multiples of
// 2*pi) or by an integer-matrix isometry (signed permutation), via a chosen
// generator.
struct FiniteCyclicDesc {
    int order = 1;
    std::vector<Rational> translation;  // per axis, units of 2*pi (empty if matrix action)
    std::vector<ZVec> matrix_cols;      // generator matrix columns (empty if translation)

    friend bool operator==(const FiniteCyclicDesc& a, const FiniteCyclicDesc& b) {
        return a.order == b.order && a.translation == b.translation &&
               a.matrix_cols == b.matrix_cols;
    }
};

// Product of circle factors acting by translation along the listed axes.
struct CircleDesc {
    std::vector<int> axes;

    friend bool operator==(const CircleDesc& a, const CircleDesc& b) { return a.axes == b.axes; }
};

using GroupDescriptor = std::variant<FiniteCyclicDesc, CircleDesc>;

int group_dim(const GroupDescriptor& g);          // dimension as a Lie group
bool group_is_finite(const GroupDescriptor& g);

// Group element handle: power of the generator for finite groups; circle
// translations act trivially on covectors so a single generic handle suffices.
struct GroupElement {
    bool circle = false;
    long power = 0;  // mod order when finite

    friend bool operator==(const GroupElement& a, const GroupElement& b) {
        return a.circle == b.circle && a.power == b.power;
    }
};

GroupElement group_identity(const GroupDescriptor& g);
GroupElement group_multiply(const GroupDescriptor& g, const GroupElement& a, const GroupElement& b);
GroupElement group_inverse(const GroupDescriptor& g, const GroupElement& a);

// action data of a group element on the base torus
struct TorusMap {
    // x -> U x + v, with U integer (columns) and v in units of 2*pi
    std::vector<ZVec> u_cols;
    std::vector<Rational> v;
};

TorusMap group_element_map(const GroupDescriptor& g, int dim, const GroupElement& e);

// covector push-forward of a cone under the element's linear part
ConicRegion group_push_cone(const GroupDescriptor& g, const GroupElement& e, const ConicRegion& c);

// Covectors annihilating all of the action's orbit directions:
// translations along axes A give {xi : xi_a = 0, a in A}; finite groups give
// the full region.
ConicRegion transversal_cotangent(const GroupDescriptor& g, int dim);

std::vector<ZVec> identity_cols(int dim);
std::vector<ZVec> matrix_power_cols(const std::vector<ZVec>& cols, long p, int dim);
std::vector<ZVec> matrix_inverse_transpose_cols(const std::vector<ZVec>& cols, int dim);

}  // namespace torcal
