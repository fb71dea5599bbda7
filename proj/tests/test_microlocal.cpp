#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "torcal/microlocal.hpp"
#include "torcal/rng.hpp"

using namespace torcal;

namespace {

GroupDescriptor swap_2d() {
    FiniteCyclicDesc d;
    d.order = 2;
    d.matrix_cols = {{0, 1}, {1, 0}};
    return d;
}

GroupDescriptor quarter_rot_2d() {
    FiniteCyclicDesc d;
    d.order = 4;
    d.matrix_cols = {{0, 1}, {-1, 0}};
    return d;
}

GroupDescriptor circle_axis0() { return CircleDesc{{0}}; }
GroupDescriptor circle_axis1() { return CircleDesc{{1}}; }
GroupDescriptor circle_both() { return CircleDesc{{0, 1}}; }

// {xi_0 = 0} and {xi_1 = 0} on the two-torus
ConicRegion vert() { return ConicRegion::coordinate_subspace(2, {0}); }
ConicRegion horiz() { return ConicRegion::coordinate_subspace(2, {1}); }

// {|xi_1| <= |xi_0|}: double sector around the first axis
ConicRegion wide0() {
    return ConicRegion::sector(Dir{1, -1}, Dir{1, 1})
        .unite(ConicRegion::sector(Dir{-1, 1}, Dir{-1, -1}));
}

// {2 |xi_1| <= |xi_0|}
ConicRegion narrow0() {
    return ConicRegion::sector(Dir{2, -1}, Dir{2, 1})
        .unite(ConicRegion::sector(Dir{-2, 1}, Dir{-2, -1}));
}

PolyhomogeneousSymbol xi_square(int dim, int axis) {
    ZVec alpha(static_cast<size_t>(dim), 0);
    alpha[static_cast<size_t>(axis)] = 2;
    XiPart p;
    p.L = laurent_monomial(alpha, ExactScalar(1));
    return PolyhomogeneousSymbol::from_xipart(dim, 2, p);
}

PolyhomogeneousSymbol linear_combo(const ExactScalar& a, const ExactScalar& b) {
    XiPart p;
    p.L = laurent_monomial({1, 0}, a);
    laurent_accumulate(p.L, laurent_monomial({0, 1}, b), ExactScalar(1));
    return PolyhomogeneousSymbol::from_xipart(2, 1, p);
}

// 1 + sum of xi_a^2 over the listed axes
PolyhomogeneousSymbol shifted_laplace(int dim, const std::vector<int>& axes) {
    PolyhomogeneousSymbol s = PolyhomogeneousSymbol::constant(dim, ExactScalar(1));
    for (int a : axes) s = symbol_add(s, xi_square(dim, a));
    return s;
}

MatrixSymbol mat1(const PolyhomogeneousSymbol& s) {
    MatrixSymbol m = MatrixSymbol::zero_matrix(1, s.dim);
    m.at(0, 0) = s;
    return m;
}

std::vector<ZVec> mat_mul_cols(const std::vector<ZVec>& a, const std::vector<ZVec>& b) {
    size_t n = a.size();
    std::vector<ZVec> r(n, zvec_zero(static_cast<int>(n)));
    for (size_t j = 0; j < n; ++j)
        for (size_t i = 0; i < n; ++i) {
            long s = 0;
            for (size_t k = 0; k < n; ++k) s += a[k][i] * b[j][k];
            r[j][i] = s;
        }
    return r;
}

TorusMap random_signed_perm(Rng& rng) {
    bool swap = rng.coin();
    long s0 = rng.coin() ? 1 : -1;
    long s1 = rng.coin() ? 1 : -1;
    TorusMap m;
    m.u_cols = swap ? std::vector<ZVec>{{0, s0}, {s1, 0}}
                    : std::vector<ZVec>{{s0, 0}, {0, s1}};
    m.v = {Rational(0), Rational(0)};
    return m;
}

SymbolFamily tagged_family(const GroupDescriptor& G, int dim, long key,
                           const ConicRegion& tag) {
    SymbolFamily f = SymbolFamily::zero(G, dim, 1);
    FamilyMember m;
    m.symbol = mat1(PolyhomogeneousSymbol::constant(dim, ExactScalar(1)));
    m.extra.dim = dim;
    m.extra.rank = 1;
    m.support_tag = tag;
    f.members.emplace(key, std::move(m));
    return f;
}

}  // namespace

TEST_CASE("transversal cotangent regions") {
    CHECK(transversal_cotangent(circle_axis0(), 2) == vert());
    CHECK(transversal_cotangent(circle_axis1(), 2) == horiz());
    CHECK(transversal_cotangent(swap_2d(), 2).is_full());
    CHECK(transversal_cotangent(circle_both(), 2).is_empty());
    CHECK(transversal_cotangent(circle_axis0(), 1).is_empty());

    // the transversal region is preserved by every group element
    for (long p = 0; p < 4; ++p) {
        ConicRegion tg = transversal_cotangent(quarter_rot_2d(), 2);
        CHECK(group_push_cone(quarter_rot_2d(), GroupElement{false, p}, tg) == tg);
    }
    ConicRegion tg = transversal_cotangent(circle_axis0(), 2);
    CHECK(group_push_cone(circle_axis0(), GroupElement{true, 0}, tg) == tg);
}

TEST_CASE("pushforward along torus maps") {
    TorusMap swap_map = group_element_map(swap_2d(), 2, GroupElement{false, 1});
    CHECK(pushforward_region(swap_map, vert()) == horiz());
    CHECK(pushforward_region(swap_map, ConicRegion::full(2)).is_full());

    // functoriality over signed permutations
    Rng rng(2026);
    std::vector<ConicRegion> probes = {vert(), horiz(), wide0(), ConicRegion::empty(2),
                                       ConicRegion::full(2),
                                       ConicRegion::sector(Dir{1, 0}, Dir{1, 1})};
    for (int trial = 0; trial < 40; ++trial) {
        TorusMap f = random_signed_perm(rng);
        TorusMap g = random_signed_perm(rng);
        TorusMap fg;
        fg.u_cols = mat_mul_cols(f.u_cols, g.u_cols);
        fg.v = {Rational(0), Rational(0)};
        for (const ConicRegion& s : probes)
            CHECK(pushforward_region(fg, s) ==
                  pushforward_region(f, pushforward_region(g, s)));
    }
}

TEST_CASE("pushforward along point inclusions and projections") {
    // a point supports no directions, yet its image constrains nothing
    CHECK(pushforward_region(PointInclusion{2}, ConicRegion::empty(1)).is_full());
    CHECK(pushforward_region(PointInclusion{1}, ConicRegion::empty(2)).is_full());
    CHECK_THROWS_AS(pushforward_region(PointInclusion{2}, ConicRegion::full(1)),
                    ExactDomainError);

    ProjectionAxes keep0{{0}};
    CHECK(pushforward_region(keep0, wide0()) == ConicRegion::half_lines(true, true));
    CHECK(pushforward_region(keep0, ConicRegion::sector(Dir{2, -1}, Dir{2, 1})) ==
          ConicRegion::half_lines(true, false));
    CHECK(pushforward_region(keep0, vert()).is_empty());
    CHECK(pushforward_region(keep0, horiz()) == ConicRegion::half_lines(true, true));
    CHECK(pushforward_region(keep0, ConicRegion::full(2)).is_full());
    CHECK(pushforward_region(keep0, ConicRegion::empty(2)).is_empty());
    CHECK(pushforward_region(ProjectionAxes{{0, 1}}, wide0()) == wide0());

    ConicRegion plane3 = ConicRegion::coordinate_subspace(3, {1});
    CHECK(pushforward_region(ProjectionAxes{{0, 1}}, plane3) ==
          ConicRegion::coordinate_subspace(2, {1}));
    CHECK(pushforward_region(ProjectionAxes{{1, 2}}, plane3) ==
          ConicRegion::coordinate_subspace(2, {0}));
    CHECK(pushforward_region(ProjectionAxes{{0, 2}}, plane3).is_full());

    CHECK_THROWS_AS(pushforward_region(ProjectionAxes{{}}, ConicRegion::full(2)),
                    ExactDomainError);
    CHECK_THROWS_AS(pushforward_region(ProjectionAxes{{1, 0}}, ConicRegion::full(2)),
                    ExactDomainError);
    CHECK_THROWS_AS(pushforward_region(ProjectionAxes{{0, 5}}, ConicRegion::full(2)),
                    ExactDomainError);
}

TEST_CASE("relation composition") {
    GroupDescriptor trivial = FiniteCyclicDesc{1, {}, {}};

    // diagonal relations compose by intersecting cones
    ComposedRelation c = compose_relations(trivial, WavefrontRelation::diagonal(2, wide0()),
                                           WavefrontRelation::diagonal(2, narrow0()));
    CHECK_FALSE(c.projection_clash);
    CHECK(relation_equal(trivial, c.rel, WavefrontRelation::diagonal(2, narrow0())));

    // disjoint diagonal supports annihilate
    c = compose_relations(circle_both(), WavefrontRelation::diagonal(2, vert()),
                          WavefrontRelation::diagonal(2, horiz()));
    CHECK(c.rel.is_empty());

    // empty factor annihilates
    c = compose_relations(trivial, WavefrontRelation::diagonal(2, wide0()),
                          WavefrontRelation::empty_relation(2));
    CHECK(c.rel.is_empty());
    c = compose_relations(trivial, WavefrontRelation::empty_relation(2),
                          WavefrontRelation::diagonal(2, wide0()));
    CHECK(c.rel.is_empty());

    // graph pieces multiply in the group
    WavefrontRelation g = WavefrontRelation::empty_relation(2);
    g.pieces.push_back(GraphPiece{GroupElement{false, 1}, ConicRegion::full(2)});
    c = compose_relations(swap_2d(), g, g);
    CHECK(c.rel.pieces.size() == 1);
    CHECK(c.rel.pieces[0].g.power == 0);
    CHECK(c.rel.pieces[0].cone.is_full());

    // the middle covector must land in the first factor's cone
    WavefrontRelation gh = WavefrontRelation::empty_relation(2);
    gh.pieces.push_back(GraphPiece{GroupElement{false, 1}, horiz()});
    c = compose_relations(swap_2d(), gh, gh);
    CHECK(c.rel.is_empty());

    // zero-section components propagate and flag the clash
    WavefrontRelation r1 = WavefrontRelation::diagonal(2, ConicRegion::full(2));
    r1.zero_in = vert();
    WavefrontRelation r2 = WavefrontRelation::diagonal(2, ConicRegion::full(2));
    r2.zero_out = horiz();
    c = compose_relations(trivial, r1, r2);
    CHECK(c.projection_clash);
    CHECK(c.rel.zero_in == vert());
    CHECK(c.rel.zero_out == horiz());

    WavefrontRelation feed = WavefrontRelation::empty_relation(2);
    feed.pieces.push_back(GraphPiece{GroupElement{false, 1}, ConicRegion::full(2)});
    WavefrontRelation sink = WavefrontRelation::empty_relation(2);
    sink.zero_in = vert();
    c = compose_relations(swap_2d(), feed, sink);
    CHECK_FALSE(c.projection_clash);
    CHECK(c.rel.pieces.empty());
    CHECK(c.rel.zero_in == horiz());  // swap pushes {xi_0 = 0} to {xi_1 = 0}
}

TEST_CASE("family wavefront bounds") {
    // multiplication family over the swap: one graph piece per supported slot
    AlgebraElement phi = AlgebraElement::zero(swap_2d(), 2);
    phi.data.emplace(1, TrigPolynomial::mode(2, {1, 0}, ExactScalar(1)));
    WavefrontRelation r = family_wavefront(lift_to_family(phi));
    CHECK(r.pieces.size() == 1);
    CHECK(r.pieces[0].g.power == 1);
    CHECK(r.pieces[0].cone.is_full());
    CHECK(r.zero_in.is_empty());

    AlgebraElement f = AlgebraElement::embed(swap_2d(), TrigPolynomial::mode(2, {0, 1}));
    r = family_wavefront(lift_to_family(f));
    CHECK(relation_equal(swap_2d(), r,
                         WavefrontRelation::diagonal(2, ConicRegion::full(2))));

    // circle slots collapse onto the transversal diagonal
    SymbolFamily fam = SymbolFamily::zero(circle_axis0(), 2, 1);
    FamilyMember m;
    m.symbol = mat1(PolyhomogeneousSymbol::constant(2, ExactScalar(1)));
    m.extra.dim = 2;
    fam.members.emplace(1, m);
    r = family_wavefront(fam);
    CHECK(r.pieces.size() == 1);
    CHECK(r.pieces[0].g.circle);
    CHECK(r.pieces[0].cone == vert());

    SymbolFamily del = SymbolFamily::at_identity(circle_axis0(),
                                                 mat1(shifted_laplace(2, {0, 1})));
    r = family_wavefront(del);
    CHECK(r.pieces.size() == 1);
    CHECK(r.pieces[0].cone == vert());

    // a support tag away from the transversal region certifies smoothing
    SymbolFamily sm = tagged_family(circle_axis0(), 2, 1, narrow0());
    WavefrontRelation rs = family_wavefront(sm);
    CHECK(rs.is_empty());
    ComposedRelation comp = compose_relations(circle_axis0(), rs, r);
    CHECK(comp.rel.is_empty());
    CHECK_FALSE(comp.projection_clash);
    comp = compose_relations(circle_axis0(), r, rs);
    CHECK(comp.rel.is_empty());

    // opaque members must be tagged
    SymbolFamily bad = SymbolFamily::zero(swap_2d(), 2, 1);
    FamilyMember om;
    om.symbol = MatrixSymbol::zero_matrix(1, 2);
    om.extra.dim = 2;
    om.opaque = true;
    bad.members.emplace(1, om);
    CHECK_THROWS_AS(family_wavefront(bad), ExactDomainError);
    bad.members.at(1).support_tag = narrow0();
    CHECK(family_wavefront(bad).pieces.size() == 1);
}

TEST_CASE("scalar and matrix classification") {
    // full torus Laplacian: elliptic everywhere
    SymbolClass cls = classify_symbol(mat1(shifted_laplace(2, {0, 1})), swap_2d());
    CHECK(cls.elliptic);
    CHECK(cls.transversally_elliptic);
    CHECK_FALSE(cls.transversally_smoothing);
    CHECK(cls.char_cone.is_empty());

    // vertical Laplacian against the horizontal circle action
    cls = classify_symbol(mat1(shifted_laplace(2, {1})), circle_axis0());
    CHECK_FALSE(cls.elliptic);
    CHECK(cls.transversally_elliptic);
    CHECK(cls.char_cone == horiz());

    // same symbol against the wrong circle factor
    cls = classify_symbol(mat1(shifted_laplace(2, {1})), circle_axis1());
    CHECK_FALSE(cls.transversally_elliptic);

    // first-order elliptic systems through the off-diagonal corners
    cls = classify_symbol(DiracOperator::flat(2).symbol, swap_2d());
    CHECK(cls.elliptic);
    cls = classify_symbol(DiracOperator::flat(1).symbol,
                          GroupDescriptor(FiniteCyclicDesc{1, {}, {}}));
    CHECK(cls.elliptic);

    // del-bar is elliptic, a real linear form is not
    cls = classify_symbol(mat1(linear_combo(ExactScalar(1), ExactScalar::i())),
                          swap_2d());
    CHECK(cls.elliptic);
    cls = classify_symbol(mat1(linear_combo(ExactScalar(1), ExactScalar(1))), swap_2d());
    CHECK_FALSE(cls.elliptic);
    CHECK(cls.char_cone ==
          ConicRegion::ray(2, {-1, 1}).unite(ConicRegion::ray(2, {1, -1})));

    // marker completion: transversally elliptic symbol plus a tagged patch
    PolyhomogeneousSymbol completion = symbol_add(
        shifted_laplace(2, {1}),
        symbol_apply_marker(shifted_laplace(2, {0}), wide0()));
    cls = classify_symbol(mat1(completion), circle_axis0());
    CHECK(cls.elliptic);

    // tagged-only symbol: smoothing across the transversal region, never elliptic
    cls = classify_symbol(
        mat1(symbol_apply_marker(PolyhomogeneousSymbol::constant(2, ExactScalar(1)),
                                 wide0())),
        circle_axis0());
    CHECK(cls.transversally_smoothing);
    CHECK_FALSE(cls.elliptic);
    CHECK(cls.char_cone == wide0().complement_closure());

    // zero symbol: nothing invertible, everything smoothing
    cls = classify_symbol(MatrixSymbol::zero_matrix(1, 2), circle_axis0());
    CHECK(cls.char_cone.is_full());
    CHECK(cls.transversally_smoothing);
    CHECK_FALSE(cls.elliptic);

    // shapes the exact classifier must refuse
    CHECK_THROWS_AS(classify_symbol(mat1(PolyhomogeneousSymbol::from_trig(
                                        2, TrigPolynomial::mode(2, {1, 0}))),
                                    swap_2d()),
                    ExactDomainError);
    XiPart mixed;
    mixed.L = laurent_monomial({1, 0}, ExactScalar(1));
    mixed.M = laurent_monomial({0, 0}, ExactScalar(1));
    CHECK_THROWS_AS(classify_symbol(mat1(PolyhomogeneousSymbol::from_xipart(2, 1, mixed)),
                                    swap_2d()),
                    ExactDomainError);

    // ellipticity always implies transversal ellipticity
    Rng rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        ZVec alpha = {rng.range(0, 2), rng.range(0, 2)};
        XiPart p;
        p.L = laurent_monomial(alpha, ExactScalar(rng.range(1, 3)));
        PolyhomogeneousSymbol s =
            PolyhomogeneousSymbol::from_xipart(2, zvec_total(alpha), p);
        GroupDescriptor G = rng.coin() ? GroupDescriptor(circle_axis0())
                                       : GroupDescriptor(swap_2d());
        SymbolClass r = classify_symbol(mat1(s), G);
        CHECK((!r.elliptic || r.transversally_elliptic));
    }
}

TEST_CASE("family classification") {
    // untwisted family: the identity slot decides everything
    SymbolFamily base = SymbolFamily::at_identity(swap_2d(), mat1(shifted_laplace(2, {0, 1})));
    SymbolClass cls = classify_family(base);
    CHECK(cls.elliptic);
    CHECK(cls.transversally_elliptic);

    // smoothing twisted slot: transversal conclusions survive, full ellipticity
    // is no longer certified
    SymbolFamily mixed = SymbolFamily::at_identity(circle_axis0(), mat1(shifted_laplace(2, {1})));
    FamilyMember m;
    m.symbol = mat1(PolyhomogeneousSymbol::constant(2, ExactScalar(1)));
    m.extra.dim = 2;
    m.support_tag = narrow0();
    mixed.members.emplace(1, m);
    cls = classify_family(mixed);
    CHECK(cls.transversally_elliptic);
    CHECK_FALSE(cls.elliptic);
    CHECK_FALSE(cls.transversally_smoothing);
    CHECK(cls.char_cone == horiz());

    // all slots smoothing
    SymbolFamily sm = tagged_family(circle_axis0(), 2, 1, narrow0());
    cls = classify_family(sm);
    CHECK(cls.transversally_smoothing);
    CHECK_FALSE(cls.elliptic);

    // a twisted slot meeting the transversal region is not classifiable here
    SymbolFamily bad = tagged_family(swap_2d(), 2, 1, wide0());
    CHECK_THROWS_AS(classify_family(bad), ExactDomainError);
}

TEST_CASE("relation json round trip") {
    WavefrontRelation r = WavefrontRelation::empty_relation(2);
    r.pieces.push_back(GraphPiece{GroupElement{false, 1}, wide0()});
    r.pieces.push_back(GraphPiece{GroupElement{false, 0}, vert()});
    r.zero_in = horiz();
    Json j = relation_to_json(r);
    WavefrontRelation back = relation_from_json(j);
    CHECK(relation_equal(swap_2d(), r, back));
    CHECK(relation_to_json(back).dump() == j.dump());

    Json bad = Json::object();
    bad["pieces"] = Json::array();
    CHECK_THROWS_AS(relation_from_json(bad), SchemaError);
    bad["dim"] = 2;
    Json piece = Json::object();
    piece["element"] = Json::object();
    piece["element"]["circle"] = false;
    piece["cone"] = cone_to_json(vert());
    bad["pieces"].push_back(piece);
    CHECK_THROWS_AS(relation_from_json(bad), SchemaError);
}
