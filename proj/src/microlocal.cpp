#include "torcal/microlocal.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace torcal {

namespace {

GroupElement canonical_element(const GroupDescriptor& G, const GroupElement& e) {
    if (!group_is_finite(G)) return GroupElement{true, 0};
    long q = std::get<FiniteCyclicDesc>(G).order;
    return GroupElement{false, ((e.power % q) + q) % q};
}

}  // namespace

WavefrontRelation WavefrontRelation::empty_relation(int dim) {
    WavefrontRelation r;
    r.dim = dim;
    r.zero_in = ConicRegion::empty(dim);
    r.zero_out = ConicRegion::empty(dim);
    return r;
}

WavefrontRelation WavefrontRelation::diagonal(int dim, const ConicRegion& cone) {
    WavefrontRelation r = empty_relation(dim);
    if (!cone.is_empty()) r.pieces.push_back(GraphPiece{GroupElement{}, cone});
    return r;
}

bool WavefrontRelation::is_empty() const {
    for (const GraphPiece& p : pieces)
        if (!p.cone.is_empty()) return false;
    return zero_in.is_empty() && zero_out.is_empty();
}

void relation_normalize(const GroupDescriptor& G, WavefrontRelation& r) {
    std::map<long, ConicRegion> merged;
    for (const GraphPiece& p : r.pieces) {
        if (p.cone.is_empty()) continue;
        GroupElement e = canonical_element(G, p.g);
        auto it = merged.find(e.power);
        if (it == merged.end())
            merged.emplace(e.power, p.cone);
        else
            it->second = it->second.unite(p.cone);
    }
    r.pieces.clear();
    bool circle = !group_is_finite(G);
    for (const auto& [power, cone] : merged)
        r.pieces.push_back(GraphPiece{GroupElement{circle, power}, cone});
}

bool relation_equal(const GroupDescriptor& G, const WavefrontRelation& a,
                    const WavefrontRelation& b) {
    if (a.dim != b.dim) return false;
    WavefrontRelation x = a, y = b;
    relation_normalize(G, x);
    relation_normalize(G, y);
    if (x.pieces.size() != y.pieces.size()) return false;
    for (size_t i = 0; i < x.pieces.size(); ++i) {
        if (!(x.pieces[i].g == y.pieces[i].g)) return false;
        if (!(x.pieces[i].cone == y.pieces[i].cone)) return false;
    }
    return x.zero_in == y.zero_in && x.zero_out == y.zero_out;
}

ComposedRelation compose_relations(const GroupDescriptor& G, const WavefrontRelation& r1,
                                   const WavefrontRelation& r2) {
    if (r1.dim != r2.dim) throw ExactDomainError("compose_relations: dimension mismatch");
    ComposedRelation out;
    out.rel = WavefrontRelation::empty_relation(r1.dim);
    // graph over graph: (g1 g2, C2 cap (g2^-1)_* C1)
    for (const GraphPiece& p1 : r1.pieces) {
        for (const GraphPiece& p2 : r2.pieces) {
            ConicRegion mid = group_push_cone(G, group_inverse(G, p2.g), p1.cone);
            ConicRegion cone = p2.cone.intersect(mid);
            if (!cone.is_empty())
                out.rel.pieces.push_back(GraphPiece{group_multiply(G, p1.g, p2.g), cone});
        }
    }
    // zero-section bookkeeping: outputs over a vanishing input side come from
    // r1 directly or from r1 pieces feeding r2's zero_in, and dually
    ConicRegion zi = r1.zero_in;
    for (const GraphPiece& p1 : r1.pieces)
        zi = zi.unite(group_push_cone(G, p1.g, p1.cone.intersect(r2.zero_in)));
    ConicRegion zo = r2.zero_out;
    for (const GraphPiece& p2 : r2.pieces)
        zo = zo.unite(
            p2.cone.intersect(group_push_cone(G, group_inverse(G, p2.g), r1.zero_out)));
    out.rel.zero_in = zi;
    out.rel.zero_out = zo;
    out.projection_clash = !r1.zero_in.is_empty() && !r2.zero_out.is_empty();
    relation_normalize(G, out.rel);
    return out;
}

namespace {

// detect a coordinate-subspace region by probing the axis rays
std::optional<std::vector<int>> region_as_subspace(const ConicRegion& s) {
    int n = s.dim();
    std::vector<int> zero_axes;
    for (int i = 0; i < n; ++i) {
        ZVec e = zvec_zero(n);
        e[static_cast<size_t>(i)] = 1;
        if (!s.contains_lattice(e)) zero_axes.push_back(i);
    }
    if (s == ConicRegion::coordinate_subspace(n, zero_axes)) return zero_axes;
    return std::nullopt;
}

}  // namespace

ConicRegion pushforward_region(const MapDescriptor& f, const ConicRegion& s) {
    if (std::holds_alternative<TorusMap>(f)) {
        const TorusMap& m = std::get<TorusMap>(f);
        int n = static_cast<int>(m.u_cols.size());
        if (s.dim() != n) throw ExactDomainError("pushforward_region: dimension mismatch");
        // diffeomorphism: covectors move by the inverse transpose, the zero
        // branch contributes nothing
        return s.linear_image(matrix_inverse_transpose_cols(m.u_cols, n));
    }
    if (std::holds_alternative<PointInclusion>(f)) {
        const PointInclusion& m = std::get<PointInclusion>(f);
        if (m.target_dim < 1) throw ExactDomainError("pushforward_region: bad target dimension");
        if (!s.is_empty())
            throw ExactDomainError("pushforward_region: a point carries no nonzero covectors");
        // every covector pulls back to zero on a point, so the image is full
        return ConicRegion::full(m.target_dim);
    }
    const std::vector<int>& keep = std::get<ProjectionAxes>(f).keep;
    int n = s.dim();
    if (keep.empty()) throw ExactDomainError("pushforward_region: empty projection");
    for (size_t j = 0; j < keep.size(); ++j) {
        if (keep[j] < 0 || keep[j] >= n)
            throw ExactDomainError("pushforward_region: projection axis out of range");
        if (j > 0 && keep[j] <= keep[j - 1])
            throw ExactDomainError("pushforward_region: projection axes must increase");
    }
    int m = static_cast<int>(keep.size());
    if (m == n) return s;
    if (s.is_empty()) return ConicRegion::empty(m);
    if (s.is_full()) return ConicRegion::full(m);
    if (n == 2 && m == 1) {
        // eta is in the image iff its embedding (zeros on dropped axes) lies
        // in s; membership of the two axis rays decides this exactly
        ZVec plus = zvec_zero(2), minus = zvec_zero(2);
        plus[static_cast<size_t>(keep[0])] = 1;
        minus[static_cast<size_t>(keep[0])] = -1;
        return ConicRegion::half_lines(s.contains_lattice(plus), s.contains_lattice(minus));
    }
    if (auto zero_axes = region_as_subspace(s)) {
        // constraints on dropped axes hold automatically for embedded covectors
        std::vector<int> za;
        for (int j = 0; j < m; ++j)
            if (std::binary_search(zero_axes->begin(), zero_axes->end(), keep[j]))
                za.push_back(j);
        return ConicRegion::coordinate_subspace(m, za);
    }
    throw ExactDomainError("pushforward_region: projection image needs refinement");
}

namespace {

ConicRegion member_support(const FamilyMember& m, int dim) {
    if (m.support_tag) return *m.support_tag;
    if (m.opaque)
        throw ExactDomainError("opaque family member carries no support tag");
    // finite-rank extras are smoothing and contribute no directions
    ConicRegion c = ConicRegion::empty(dim);
    for (const PolyhomogeneousSymbol& s : m.symbol.entries)
        c = c.unite(symbol_essential_support(s));
    return c;
}

}  // namespace

WavefrontRelation family_wavefront(const SymbolFamily& p) {
    WavefrontRelation r = WavefrontRelation::empty_relation(p.dim);
    ConicRegion tg = transversal_cotangent(p.G, p.dim);
    if (group_is_finite(p.G)) {
        for (const auto& [key, m] : p.members) {
            GroupElement e{false, key};
            // both ends of the graph must sit in the transversal region
            ConicRegion c = member_support(m, p.dim)
                                .intersect(tg)
                                .intersect(group_push_cone(p.G, group_inverse(p.G, e), tg));
            if (!c.is_empty()) r.pieces.push_back(GraphPiece{e, c});
        }
    } else {
        // circle translations fix covectors, so every slot lands on one
        // diagonal piece
        ConicRegion c = ConicRegion::empty(p.dim);
        for (const auto& [key, m] : p.members) c = c.unite(member_support(m, p.dim));
        if (p.delta) c = c.unite(member_support(*p.delta, p.dim));
        c = c.intersect(tg);
        if (!c.is_empty()) r.pieces.push_back(GraphPiece{GroupElement{true, 0}, c});
    }
    relation_normalize(p.G, r);
    return r;
}

namespace {

// axis index when alpha is a single first power, else -1
int single_axis_first_power(const ZVec& alpha) {
    int axis = -1;
    for (size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] == 0) continue;
        if (alpha[i] != 1 || axis >= 0) return -1;
        axis = static_cast<int>(i);
    }
    return axis;
}

// zero set of a xi + b xi' with a, b in Q(i), on real covectors
ConicRegion two_term_zero_set(int i, const ExactScalar& a, int j, const ExactScalar& b,
                              int dim) {
    Rational det = a.re * b.im - a.im * b.re;
    if (det != 0) return ConicRegion::coordinate_subspace(dim, {i, j});
    // proportional real and imaginary parts: one real linear condition
    Rational mu = a.re, nu = b.re;
    if (mu == 0 && nu == 0) {
        mu = a.im;
        nu = b.im;
    }
    if (nu == 0) return ConicRegion::coordinate_subspace(dim, {i});
    if (mu == 0) return ConicRegion::coordinate_subspace(dim, {j});
    if (dim != 2)
        throw ExactDomainError("characteristic line off the axes needs refinement");
    // mu xi_i + nu xi_j = 0: the line through (-nu, mu) on the (i, j) plane
    Integer di = -nu.get_num() * mu.get_den();
    Integer dj = mu.get_num() * nu.get_den();
    Integer g = gcd(abs(di), abs(dj));
    di /= g;
    dj /= g;
    if (!di.fits_slong_p() || !dj.fits_slong_p())
        throw ExactDomainError("characteristic direction overflows");
    ZVec d = zvec_zero(2);
    d[static_cast<size_t>(i)] = di.get_si();
    d[static_cast<size_t>(j)] = dj.get_si();
    return ConicRegion::ray(2, d).unite(ConicRegion::ray(2, -d));
}

// zero set of a nonzero homogeneous Laurent polynomial on xi != 0, for the
// shapes the exact classifier understands
ConicRegion laurent_zero_set(const LaurentPoly& p, int dim) {
    if (p.size() == 1) {
        // a monomial vanishes or is singular exactly on the axes it involves
        const ZVec& alpha = p.begin()->first;
        ConicRegion z = ConicRegion::empty(dim);
        for (int i = 0; i < dim; ++i)
            if (alpha[static_cast<size_t>(i)] != 0)
                z = z.unite(ConicRegion::coordinate_subspace(dim, {i}));
        return z;
    }
    if (p.size() == 2) {
        auto it = p.begin();
        int i = single_axis_first_power(it->first);
        ExactScalar a = it->second;
        ++it;
        int j = single_axis_first_power(it->first);
        ExactScalar b = it->second;
        if (i >= 0 && j >= 0 && i != j) return two_term_zero_set(i, a, j, b, dim);
    }
    // same-sign real combination of even monomials: each monomial must vanish
    int sign = 0;
    std::vector<std::vector<int>> supports;
    for (const auto& [alpha, c] : p) {
        if (!c.is_real()) throw ExactDomainError("characteristic set needs refinement");
        int s = c.re > 0 ? 1 : -1;
        if (sign == 0) sign = s;
        if (s != sign) throw ExactDomainError("characteristic set needs refinement");
        std::vector<int> sup;
        for (size_t k = 0; k < alpha.size(); ++k) {
            if (alpha[k] < 0 || alpha[k] % 2 != 0)
                throw ExactDomainError("characteristic set needs refinement");
            if (alpha[k] > 0) sup.push_back(static_cast<int>(k));
        }
        if (sup.empty()) return ConicRegion::empty(dim);  // positive constant term
        supports.push_back(std::move(sup));
    }
    // distribute the intersection of axis unions over choice functions
    std::set<std::vector<int>> candidates;
    std::vector<size_t> pick(supports.size(), 0);
    size_t combos = 1;
    for (const auto& s : supports) combos *= s.size();
    if (combos > 4096) throw ExactDomainError("characteristic set needs refinement");
    for (;;) {
        std::set<int> axes;
        for (size_t t = 0; t < supports.size(); ++t) axes.insert(supports[t][pick[t]]);
        candidates.insert(std::vector<int>(axes.begin(), axes.end()));
        size_t t = 0;
        while (t < pick.size() && ++pick[t] == supports[t].size()) pick[t++] = 0;
        if (t == pick.size()) break;
    }
    // keep maximal subspaces, i.e. minimal axis sets
    std::vector<std::vector<int>> minimal;
    for (const auto& c : candidates) {
        bool dominated = false;
        for (const auto& o : candidates) {
            if (o == c) continue;
            if (std::includes(c.begin(), c.end(), o.begin(), o.end())) {
                dominated = true;
                break;
            }
        }
        if (!dominated) minimal.push_back(c);
    }
    if (dim <= 2) {
        ConicRegion z = ConicRegion::empty(dim);
        for (const auto& c : minimal) z = z.unite(ConicRegion::coordinate_subspace(dim, c));
        return z;
    }
    std::vector<ConicRegion> nonempty;
    for (const auto& c : minimal) {
        ConicRegion z = ConicRegion::coordinate_subspace(dim, c);
        if (!z.is_empty()) nonempty.push_back(z);
    }
    if (nonempty.empty()) return ConicRegion::empty(dim);
    if (nonempty.size() == 1) return nonempty.front();
    throw ExactDomainError("characteristic set needs refinement");
}

ConicRegion zero_of_xipart(const XiPart& p, int dim) {
    if (xipart_is_zero(p)) return ConicRegion::full(dim);
    // |xi|^{-2J} never vanishes away from the origin
    if (laurent_is_zero(p.M)) return laurent_zero_set(p.L, dim);
    if (laurent_is_zero(p.L)) return laurent_zero_set(p.M, dim);
    throw ExactDomainError("mixed |xi| parity in the principal part needs refinement");
}

// characteristic directions of a scalar symbol: per marker cell, the active
// top-degree sum must vanish
ConicRegion char_of_scalar(const PolyhomogeneousSymbol& s, int dim) {
    const std::vector<Atom>* top = nullptr;
    for (const auto& [deg, atoms] : s.terms) {
        if (!atoms.empty()) {
            top = &atoms;
            break;
        }
    }
    if (!top) return ConicRegion::full(dim);
    std::vector<ConicRegion> markers;
    for (const Atom& a : *top) {
        if (!a.marker) continue;
        bool seen = false;
        for (const ConicRegion& m : markers)
            if (m == *a.marker) {
                seen = true;
                break;
            }
        if (!seen) markers.push_back(*a.marker);
    }
    if (markers.size() > 10)
        throw ExactDomainError("too many marker cells in the principal part");
    ConicRegion ch = ConicRegion::empty(dim);
    for (unsigned long mask = 0; mask < (1ul << markers.size()); ++mask) {
        ConicRegion cell = ConicRegion::full(dim);
        for (size_t i = 0; i < markers.size(); ++i)
            cell = cell.intersect(((mask >> i) & 1) ? markers[i]
                                                    : markers[i].complement_closure());
        if (cell.is_empty()) continue;
        XiPart sum;
        for (const Atom& a : *top) {
            bool active = true;
            if (a.marker) {
                active = false;
                for (size_t i = 0; i < markers.size(); ++i)
                    if (((mask >> i) & 1) && markers[i] == *a.marker) active = true;
            }
            if (!active) continue;
            if (!zvec_is_zero(a.xmode))
                throw ExactDomainError("x-dependent principal part needs refinement");
            sum = xipart_add(sum, a.xi, dim);
        }
        ch = ch.unite(zero_of_xipart(sum, dim).intersect(cell));
    }
    return ch;
}

ConicRegion matrix_char(const MatrixSymbol& p) {
    bool diag_all_zero = true, offdiag_all_zero = true;
    for (int r = 0; r < p.size; ++r) {
        for (int c = 0; c < p.size; ++c) {
            if (p.at(r, c).is_zero()) continue;
            (r == c ? diag_all_zero : offdiag_all_zero) = false;
        }
    }
    ConicRegion ch = ConicRegion::empty(p.dim);
    if (offdiag_all_zero) {
        for (int r = 0; r < p.size; ++r) ch = ch.unite(char_of_scalar(p.at(r, r), p.dim));
        return ch;
    }
    if (p.size == 2 && diag_all_zero) {
        // det = -(p01 p10): invertible where both corners are
        ch = char_of_scalar(p.at(0, 1), p.dim).unite(char_of_scalar(p.at(1, 0), p.dim));
        return ch;
    }
    throw ExactDomainError("matrix shape outside the exact classifier");
}

}  // namespace

SymbolClass classify_symbol(const MatrixSymbol& p, const GroupDescriptor& G) {
    ConicRegion tg = transversal_cotangent(G, p.dim);
    ConicRegion ess = ConicRegion::empty(p.dim);
    for (const PolyhomogeneousSymbol& s : p.entries) ess = ess.unite(symbol_essential_support(s));
    SymbolClass out;
    out.char_cone = matrix_char(p);
    out.elliptic = out.char_cone.is_empty();
    out.transversally_elliptic = out.char_cone.intersect(tg).is_empty();
    out.transversally_smoothing = ess.intersect(tg).is_empty();
    return out;
}

SymbolClass classify_family(const SymbolFamily& p) {
    ConicRegion tg = transversal_cotangent(p.G, p.dim);
    bool finite = group_is_finite(p.G);
    // slots whose operators spread over the group: everything except the
    // finite identity slot / the circle delta member
    bool twisted_smoothing = true, twisted_present = false;
    ConicRegion all = ConicRegion::empty(p.dim);
    for (const auto& [key, m] : p.members) {
        ConicRegion c = member_support(m, p.dim);
        all = all.unite(c);
        if (finite && key == 0) continue;
        twisted_present = true;
        if (!c.intersect(tg).is_empty()) twisted_smoothing = false;
    }
    if (p.delta) all = all.unite(member_support(*p.delta, p.dim));
    SymbolClass out;
    out.transversally_smoothing = all.intersect(tg).is_empty();
    if (!twisted_smoothing)
        throw ExactDomainError(
            "family classification needs every twisted slot transversally smoothing");
    const MatrixSymbol* base = nullptr;
    if (finite) {
        auto it = p.members.find(0);
        if (it != p.members.end()) base = &it->second.symbol;
    } else if (p.delta) {
        base = &p.delta->symbol;
    }
    MatrixSymbol zero = MatrixSymbol::zero_matrix(p.rank, p.dim);
    SymbolClass cls = classify_symbol(base ? *base : zero, p.G);
    out.char_cone = cls.char_cone;
    out.transversally_elliptic = cls.transversally_elliptic;
    // smoothing twisted slots still spoil full ellipticity off the
    // transversal region, so certify it only for untwisted families
    out.elliptic = cls.elliptic && !twisted_present;
    return out;
}

Json relation_to_json(const WavefrontRelation& r) {
    Json pieces = Json::array();
    for (const GraphPiece& p : r.pieces) {
        Json e = Json::object();
        Json g = Json::object();
        g["circle"] = p.g.circle;
        g["power"] = p.g.power;
        e["element"] = g;
        e["cone"] = cone_to_json(p.cone);
        pieces.push_back(e);
    }
    Json j = Json::object();
    j["dim"] = r.dim;
    j["pieces"] = pieces;
    j["zero_in"] = cone_to_json(r.zero_in);
    j["zero_out"] = cone_to_json(r.zero_out);
    return j;
}

WavefrontRelation relation_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_integer())
        throw SchemaError("relation: missing dim");
    int dim = j["dim"].get<int>();
    if (dim < 1 || dim > 8) throw SchemaError("relation: dim out of range");
    WavefrontRelation r = WavefrontRelation::empty_relation(dim);
    if (!j.contains("pieces") || !j["pieces"].is_array())
        throw SchemaError("relation: missing pieces");
    for (const Json& e : j["pieces"]) {
        if (!e.is_object() || !e.contains("element") || !e.contains("cone"))
            throw SchemaError("relation: malformed piece");
        const Json& g = e["element"];
        if (!g.is_object() || !g.contains("circle") || !g["circle"].is_boolean() ||
            !g.contains("power") || !g["power"].is_number_integer())
            throw SchemaError("relation: malformed element");
        GroupElement el{g["circle"].get<bool>(), g["power"].get<long>()};
        r.pieces.push_back(GraphPiece{el, cone_from_json(e["cone"], dim)});
    }
    if (j.contains("zero_in")) r.zero_in = cone_from_json(j["zero_in"], dim);
    if (j.contains("zero_out")) r.zero_out = cone_from_json(j["zero_out"], dim);
    return r;
}

}  // namespace torcal
