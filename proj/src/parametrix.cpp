#include "torcal/parametrix.hpp"

#include <variant>

namespace torcal {

namespace {

PolyhomogeneousSymbol xi_square(int dim, int axis) {
    PolyhomogeneousSymbol s;
    s.dim = dim;
    s.order = 2;
    Atom at;
    at.xmode = ZVec(dim, 0);
    ZVec alpha(dim, 0);
    alpha[axis] = 2;
    at.xi.L[alpha] = ExactScalar(1);
    s.terms[2].push_back(at);
    return s;
}

bool matrix_is_exactly_zero(const MatrixSymbol& m) {
    for (const PolyhomogeneousSymbol& e : m.entries)
        if (!e.is_exactly_zero()) return false;
    return true;
}

MatrixSymbol apply_marker_matrix(const MatrixSymbol& m, const ConicRegion& c) {
    MatrixSymbol out = m;
    for (PolyhomogeneousSymbol& e : out.entries) e = symbol_apply_marker(e, c);
    return out;
}

// same shape dispatch as the classifier: diagonal, or 2x2 with zero diagonal
MatrixSymbol principal_inverse(const MatrixSymbol& p) {
    bool diag_all_zero = true, offdiag_all_zero = true;
    for (int r = 0; r < p.size; ++r)
        for (int c = 0; c < p.size; ++c) {
            if (p.at(r, c).is_zero()) continue;
            (r == c ? diag_all_zero : offdiag_all_zero) = false;
        }
    MatrixSymbol q0 = MatrixSymbol::zero_matrix(p.size, p.dim);
    if (offdiag_all_zero) {
        for (int r = 0; r < p.size; ++r) q0.at(r, r) = symbol_invert_principal(p.at(r, r));
        return q0;
    }
    if (p.size == 2 && diag_all_zero) {
        q0.at(0, 1) = symbol_invert_principal(p.at(1, 0));
        q0.at(1, 0) = symbol_invert_principal(p.at(0, 1));
        return q0;
    }
    throw ExactDomainError("matrix shape outside the exact classifier");
}

PolyhomogeneousSymbol level_slice(const PolyhomogeneousSymbol& s, long deg) {
    PolyhomogeneousSymbol lvl;
    lvl.dim = s.dim;
    lvl.order = deg;
    auto it = s.terms.find(deg);
    if (it != s.terms.end()) lvl.terms[deg] = it->second;
    symbol_normalize(lvl);
    return lvl;
}

// q = (sum_{i < depth} K^i) o q0 with K = 1 - q0 o p
MatrixSymbol neumann_series(const MatrixSymbol& q0, const MatrixSymbol& p, int depth) {
    MatrixSymbol id = MatrixSymbol::identity(p.size, p.dim);
    MatrixSymbol k = matrix_add(id, matrix_negate(matrix_compose(q0, p, depth)));
    MatrixSymbol acc = id;
    MatrixSymbol pw = k;
    for (int i = 1; i < depth; ++i) {
        if (matrix_is_exactly_zero(pw)) break;
        acc = matrix_add(acc, pw);
        if (i + 1 < depth) pw = matrix_compose(pw, k, depth);
    }
    return matrix_compose(acc, q0, depth);
}

struct RemainderScan {
    std::optional<long> visible_top;  // top degree whose support escapes the tag
    std::optional<long> tail;         // shallowest unknown-window bound
};

RemainderScan scan_remainder(const MatrixSymbol& r, const ConicRegion& tag) {
    RemainderScan out;
    for (const PolyhomogeneousSymbol& e : r.entries) {
        for (const auto& [deg, atoms] : e.terms) {
            (void)atoms;
            ConicRegion ess = symbol_essential_support(level_slice(e, deg));
            if (tag.contains(ess)) continue;
            if (!out.visible_top || deg > *out.visible_top) out.visible_top = deg;
        }
        if (e.tail && (!out.tail || *e.tail > *out.tail)) out.tail = *e.tail;
    }
    return out;
}

// Verify both remainders stay below -depth off the tag, then record the left
// one.  Retained content beating the tail bound is impossible, so the order
// is the visible top when present and the window bound otherwise.
void finish_remainder(ParametrixResult& out, const MatrixSymbol& p, int depth) {
    MatrixSymbol id = MatrixSymbol::identity(p.size, p.dim);
    MatrixSymbol left = matrix_add(id, matrix_negate(matrix_compose(out.q, p, depth)));
    MatrixSymbol right = matrix_add(id, matrix_negate(matrix_compose(p, out.q, depth)));
    for (const MatrixSymbol* r : {&left, &right}) {
        RemainderScan scan = scan_remainder(*r, out.remainder_tag);
        if (scan.visible_top && *scan.visible_top > -depth)
            throw ExactDomainError("parametrix remainder leaks above the certified window");
        if (scan.tail && *scan.tail > -depth)
            throw ExactDomainError("input depth insufficient for the requested parametrix depth");
    }
    RemainderScan scan = scan_remainder(left, out.remainder_tag);
    out.remainder = left;
    out.remainder_order = scan.visible_top ? scan.visible_top : scan.tail;
}

}  // namespace

CutoffMarker CutoffMarker::from_region(const ConicRegion& r) {
    return CutoffMarker{r, r.complement_closure()};
}

ParametrixResult neumann_parametrix(const MatrixSymbol& p, int depth) {
    if (depth < 1) throw ExactDomainError("parametrix depth must be positive");
    GroupDescriptor trivial = FiniteCyclicDesc{1, {}, {}};
    if (!classify_symbol(p, trivial).elliptic)
        throw ExactDomainError("symbol is not elliptic");
    ParametrixResult out;
    out.q = neumann_series(principal_inverse(p), p, depth);
    out.remainder_tag = ConicRegion::empty(p.dim);
    out.transversal = false;
    finish_remainder(out, p, depth);
    return out;
}

ParametrixResult transversal_parametrix(const MatrixSymbol& p, const GroupDescriptor& G,
                                        const CutoffMarker& cutoff, int depth) {
    if (depth < 1) throw ExactDomainError("parametrix depth must be positive");
    if (!cutoff.region.unite(cutoff.complement_region).is_full())
        throw ExactDomainError("cutoff pieces must cover every direction");
    SymbolClass cls = classify_symbol(p, G);
    if (!cls.transversally_elliptic)
        throw ExactDomainError("symbol is not transversally elliptic");
    ConicRegion tg = transversal_cotangent(G, p.dim);
    if (!cutoff.region.contains(tg))
        throw ExactDomainError("cutoff region does not cover the transversal cotangent");
    if (!cutoff.complement_region.intersect(tg).is_empty())
        throw ExactDomainError("cutoff region is not a neighbourhood of the transversal cotangent");
    if (!cls.char_cone.intersect(cutoff.region).is_empty())
        throw ExactDomainError("principal symbol is not invertible on the cutoff region");

    ParametrixResult out;
    out.q = apply_marker_matrix(neumann_series(principal_inverse(p), p, depth), cutoff.region);
    out.remainder_tag = cutoff.complement_region;
    out.transversal = true;
    finish_remainder(out, p, depth);
    return out;
}

MatrixSymbol atiyah_completion(const MatrixSymbol& q, const GroupDescriptor& G,
                               const CutoffMarker& cutoff) {
    if (std::holds_alternative<FiniteCyclicDesc>(G)) {
        TorusMap gm = group_element_map(G, q.dim, GroupElement{false, 1});
        for (const PolyhomogeneousSymbol& e : q.entries)
            if (!(symbol_pullback(e, gm) == e))
                throw ExactDomainError("symbol is not invariant under the group action");
    } else {
        const auto& circ = std::get<CircleDesc>(G);
        for (const PolyhomogeneousSymbol& e : q.entries)
            for (const auto& [deg, atoms] : e.terms) {
                (void)deg;
                for (const Atom& at : atoms)
                    for (int a : circ.axes)
                        if (at.xmode[a] != 0)
                            throw ExactDomainError("symbol is not invariant under the group action");
            }
    }
    if (!classify_symbol(q, G).transversally_elliptic)
        throw ExactDomainError("symbol is not transversally elliptic");
    ConicRegion tg = transversal_cotangent(G, q.dim);
    if (!cutoff.region.intersect(tg).is_empty())
        throw ExactDomainError("completion cutoff must avoid the transversal cotangent");

    // positivity of the principal part, probed on the lattice rays spanning
    // the transversal directions; exactness needs constant coefficients there
    for (int j = 0; j < q.dim; ++j)
        for (int sgn : {1, -1}) {
            ZVec k(q.dim, 0);
            k[j] = sgn;
            if (!tg.contains_lattice(k)) continue;
            for (int r = 0; r < q.size; ++r) {
                const PolyhomogeneousSymbol& e = q.at(r, r);
                if (e.terms.empty())
                    throw ExactDomainError(
                        "principal symbol is not positive on the transversal cotangent");
                PolyhomogeneousSymbol top = level_slice(e, e.terms.begin()->first);
                for (const Atom& at : top.terms.begin()->second)
                    if (!zvec_is_zero(at.xmode))
                        throw ExactDomainError(
                            "positivity check needs constant coefficients at the top degree");
                ExactScalar v = symbol_apply_to_mode(top, k).coefficient(k);
                if (!v.is_real() || !(v.re > 0))
                    throw ExactDomainError(
                        "principal symbol is not positive on the transversal cotangent");
            }
        }

    MatrixSymbol out = q;
    if (const auto* circ = std::get_if<CircleDesc>(&G)) {
        PolyhomogeneousSymbol w = PolyhomogeneousSymbol::constant(q.dim, ExactScalar(1));
        for (int a : circ->axes) w = symbol_add(w, xi_square(q.dim, a));
        w = symbol_apply_marker(w, cutoff.region);
        for (int r = 0; r < q.size; ++r) out.at(r, r) = symbol_add(out.at(r, r), w);
    }
    if (!classify_symbol(out, G).elliptic)
        throw ExactDomainError("completion is not elliptic");
    return out;
}

Json cutoff_to_json(const CutoffMarker& c) {
    Json j;
    j["region"] = cone_to_json(c.region);
    j["complement"] = cone_to_json(c.complement_region);
    return j;
}

CutoffMarker cutoff_from_json(const Json& j, int dim) {
    if (!j.is_object() || !j.contains("region"))
        throw SchemaError("cutoff: expected an object with a region");
    CutoffMarker c;
    c.region = cone_from_json(j.at("region"), dim);
    c.complement_region = j.contains("complement") ? cone_from_json(j.at("complement"), dim)
                                                   : c.region.complement_closure();
    return c;
}

Json parametrix_to_json(const ParametrixResult& r) {
    Json j;
    j["q"] = symbol_to_json(r.q);
    j["remainder_order"] = r.remainder_order ? Json(*r.remainder_order) : Json(nullptr);
    j["remainder_tag"] = cone_to_json(r.remainder_tag);
    j["certificate"] = r.transversal ? "transversal" : "elliptic";
    return j;
}

}  // namespace torcal
