#include "torcal/crossed.hpp"

#include <algorithm>
#include <functional>
#include <string>

namespace torcal {

namespace {

long finite_order(const GroupDescriptor& g) {
    const auto* f = std::get_if<FiniteCyclicDesc>(&g);
    if (!f) throw ExactDomainError("expected a finite cyclic group");
    return f->order;
}

// crossed-product ops need a single acted axis for the mode pairing
int circle_axis(const GroupDescriptor& g) {
    const auto* c = std::get_if<CircleDesc>(&g);
    if (!c) throw ExactDomainError("expected a circle group");
    if (c->axes.size() != 1)
        throw ExactDomainError("crossed ops support a single circle factor");
    return c->axes[0];
}

// t(Ux + v): mode k moves to U^T k and picks up e^{i k.v}
TrigPolynomial trig_precompose(const TrigPolynomial& t, const TorusMap& m) {
    TrigPolynomial out(t.dim);
    for (const auto& [k, c] : t.coef) {
        ZVec kt(static_cast<size_t>(t.dim), 0);
        for (size_t j = 0; j < kt.size(); ++j) {
            long s = 0;
            for (size_t i = 0; i < kt.size(); ++i) s += k[i] * m.u_cols[j][i];
            kt[j] = s;
        }
        out.add_mode(kt, c * mode_phase(k, m.v, false));
    }
    return out;
}

ZVec mat_transpose_vec(const std::vector<ZVec>& cols, const ZVec& k) {
    ZVec out(k.size(), 0);
    for (size_t j = 0; j < out.size(); ++j) {
        long s = 0;
        for (size_t i = 0; i < k.size(); ++i) s += k[i] * cols[j][i];
        out[j] = s;
    }
    return out;
}

// rho(g) e_k = e_k compose phi_g^{-1} = phase . e_{k'}
std::pair<ZVec, ExactScalar> rho_on_mode(const GroupDescriptor& g, int dim,
                                         const GroupElement& e, const ZVec& k) {
    TorusMap m = group_element_map(g, dim, group_inverse(g, e));
    return {mat_transpose_vec(m.u_cols, k), mode_phase(k, m.v, false)};
}

void check_same_group(const GroupDescriptor& a, const GroupDescriptor& b) {
    if (!(a == b)) throw ExactDomainError("crossed ops need matching groups");
}

MatrixSymbol matrix_pullback(const MatrixSymbol& a, const TorusMap& m) {
    MatrixSymbol out = a;
    for (auto& e : out.entries) e = symbol_pullback(e, m);
    return out;
}

MatrixSymbol matrix_scale(const MatrixSymbol& a, const ExactScalar& c) {
    MatrixSymbol out = a;
    for (auto& e : out.entries) e = symbol_scale(e, c);
    return out;
}

bool matrix_exactly_zero(const MatrixSymbol& a) {
    return std::all_of(a.entries.begin(), a.entries.end(),
                       [](const PolyhomogeneousSymbol& s) { return s.is_exactly_zero(); });
}

// x-mode slices of a scalar symbol; each slice keeps the window metadata
std::map<ZVec, PolyhomogeneousSymbol> symbol_x_slices(const PolyhomogeneousSymbol& s) {
    std::map<ZVec, PolyhomogeneousSymbol> out;
    for (const auto& [deg, atoms] : s.terms)
        for (const Atom& at : atoms) {
            auto it = out.find(at.xmode);
            if (it == out.end()) {
                PolyhomogeneousSymbol slice = PolyhomogeneousSymbol::zero(s.dim);
                slice.order = s.order;
                slice.tail = s.tail;
                it = out.emplace(at.xmode, std::move(slice)).first;
            }
            it->second.terms[deg].push_back(at);
        }
    for (auto& [k, slice] : out) symbol_normalize(slice);
    return out;
}

std::map<ZVec, MatrixSymbol> matrix_x_slices(const MatrixSymbol& a) {
    std::map<ZVec, MatrixSymbol> out;
    for (int r = 0; r < a.size; ++r)
        for (int c = 0; c < a.size; ++c)
            for (auto& [k, slice] : symbol_x_slices(a.at(r, c))) {
                auto it = out.find(k);
                if (it == out.end())
                    it = out.emplace(k, MatrixSymbol::zero_matrix(a.size, a.dim)).first;
                it->second.at(r, c) = slice;
            }
    return out;
}

FamilyMember member_zero(int dim, int rank) {
    FamilyMember m;
    m.symbol = MatrixSymbol::zero_matrix(rank, dim);
    m.extra.dim = dim;
    m.extra.rank = rank;
    return m;
}

void require_transparent(const FamilyMember& m, const char* op) {
    if (m.opaque)
        throw ExactDomainError(std::string(op) + ": opaque family member has no symbol data");
}

FamilyMember member_add(const FamilyMember& a, const FamilyMember& b) {
    FamilyMember out;
    out.symbol = matrix_add(a.symbol, b.symbol);
    out.extra = finite_rank_add(a.extra, b.extra);
    if (a.support_tag && b.support_tag) out.support_tag = a.support_tag->unite(*b.support_tag);
    return out;
}

FamilyMember member_scale(const FamilyMember& a, const ExactScalar& c) {
    FamilyMember out = a;
    out.symbol = matrix_scale(a.symbol, c);
    out.extra = finite_rank_scale(a.extra, c);
    return out;
}

FamilyMember member_pullback(const FamilyMember& a, const TorusMap& m) {
    FamilyMember out = a;
    out.symbol = matrix_pullback(a.symbol, m);
    out.extra = finite_rank_pullback(a.extra, m);
    return out;
}

FamilyMember member_product(const FamilyMember& a, const FamilyMember& b, int depth) {
    FamilyMember out;
    out.symbol = matrix_compose(a.symbol, b.symbol, depth);
    out.extra = finite_rank_add(
        finite_rank_add(compose_symbol_rank(a.symbol, b.extra),
                        compose_rank_symbol(a.extra, b.symbol)),
        finite_rank_compose(a.extra, b.extra));
    return out;
}

FamilyMember member_adjoint(const FamilyMember& a, int depth) {
    FamilyMember out;
    out.symbol = matrix_adjoint(a.symbol, depth);
    out.extra = finite_rank_adjoint(a.extra);
    return out;
}

bool member_zeroish(const FamilyMember& m) {
    return !m.opaque && !m.support_tag && matrix_exactly_zero(m.symbol) && m.extra.is_zero();
}

bool member_equal(const FamilyMember& a, const FamilyMember& b) {
    if (a.opaque != b.opaque) return false;
    if (a.support_tag.has_value() != b.support_tag.has_value()) return false;
    if (a.support_tag && a.support_tag->key() != b.support_tag->key()) return false;
    if (a.opaque) return true;
    return a.symbol == b.symbol && a.extra == b.extra;
}

// accumulate a member into a family slot, dropping slots that cancel
void accumulate_member(std::map<long, FamilyMember>& members, long key, const FamilyMember& m,
                       int dim, int rank) {
    auto it = members.find(key);
    if (it == members.end()) it = members.emplace(key, member_zero(dim, rank)).first;
    it->second = member_add(it->second, m);
    if (member_zeroish(it->second)) members.erase(it);
}

ModeImage apply_member(const FamilyMember& m, const ZVec& k, int comp,
                       const ExactScalar& weight) {
    require_transparent(m, "act_on_mode");
    ModeImage out;
    for (int r = 0; r < m.symbol.size; ++r) {
        TrigPolynomial t = symbol_apply_to_mode(m.symbol.at(r, comp), k);
        for (const auto& [mu, c] : t.coef) {
            ExactScalar v = c * weight;
            if (v.is_zero()) continue;
            auto key = std::make_pair(mu, r);
            auto it = out.find(key);
            if (it == out.end())
                out.emplace(key, v);
            else {
                it->second = it->second + v;
                if (it->second.is_zero()) out.erase(it);
            }
        }
    }
    for (const auto& [key, w0] : m.extra.w) {
        if (!(key.in_mode == k) || key.in_comp != comp) continue;
        ExactScalar v = w0 * weight;
        if (v.is_zero()) continue;
        auto mk = std::make_pair(key.out_mode, key.out_comp);
        auto it = out.find(mk);
        if (it == out.end())
            out.emplace(mk, v);
        else {
            it->second = it->second + v;
            if (it->second.is_zero()) out.erase(it);
        }
    }
    return out;
}

void image_accumulate(ModeImage& into, const ModeImage& add) {
    for (const auto& [key, v] : add) {
        auto it = into.find(key);
        if (it == into.end())
            into.emplace(key, v);
        else {
            it->second = it->second + v;
            if (it->second.is_zero()) into.erase(it);
        }
    }
}

// enumerate the |k|_inf <= R lattice box
void for_each_mode(int dim, long R, const std::function<void(const ZVec&)>& f) {
    ZVec k(static_cast<size_t>(dim), -R);
    while (true) {
        f(k);
        int i = 0;
        while (i < dim) {
            if (++k[i] <= R) break;
            k[i] = -R;
            ++i;
        }
        if (i == dim) return;
    }
}

Json trig_to_json(const TrigPolynomial& t) {
    Json rows = Json::array();
    for (const auto& [k, c] : t.coef) {
        Json row = Json::array();
        for (long v : k) row.push_back(v);
        row.push_back(rational_to_string(c.re));
        row.push_back(rational_to_string(c.im));
        rows.push_back(std::move(row));
    }
    return rows;
}

TrigPolynomial trig_from_json(const Json& j, int dim) {
    if (!j.is_array()) throw SchemaError("trig polynomial: expected array of rows");
    TrigPolynomial t(dim);
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != static_cast<size_t>(dim) + 2)
            throw SchemaError("trig row must hold k coords plus re, im");
        ZVec k(static_cast<size_t>(dim), 0);
        for (int i = 0; i < dim; ++i) k[i] = row[i].get<long>();
        t.add_mode(k, ExactScalar(rational_from_string(row[dim].get<std::string>()),
                                  rational_from_string(row[dim + 1].get<std::string>())));
    }
    return t;
}

Json rank_to_json(const FiniteRankOp& f) {
    Json rows = Json::array();
    for (const auto& [key, c] : f.w) {
        Json row;
        row["out"] = key.out_mode;
        row["out_comp"] = key.out_comp;
        row["in"] = key.in_mode;
        row["in_comp"] = key.in_comp;
        row["re"] = rational_to_string(c.re);
        row["im"] = rational_to_string(c.im);
        rows.push_back(std::move(row));
    }
    return rows;
}

FiniteRankOp rank_from_json(const Json& j, int dim, int rank) {
    FiniteRankOp f;
    f.dim = dim;
    f.rank = rank;
    if (!j.is_array()) throw SchemaError("smoothing part: expected array");
    for (const auto& row : j) {
        FiniteRankOp::Key key;
        key.out_mode = row.at("out").get<ZVec>();
        key.in_mode = row.at("in").get<ZVec>();
        key.out_comp = row.value("out_comp", 0);
        key.in_comp = row.value("in_comp", 0);
        if (key.out_mode.size() != static_cast<size_t>(dim) ||
            key.in_mode.size() != static_cast<size_t>(dim))
            throw SchemaError("smoothing part: mode length mismatch");
        if (key.out_comp < 0 || key.out_comp >= rank || key.in_comp < 0 || key.in_comp >= rank)
            throw SchemaError("smoothing part: component out of range");
        f.add(key, ExactScalar(rational_from_string(row.at("re").get<std::string>()),
                               rational_from_string(row.at("im").get<std::string>())));
    }
    return f;
}

Json member_to_json(long key, const FamilyMember& m, bool with_key) {
    Json j;
    if (with_key) j["key"] = key;
    if (m.opaque) {
        j["opaque"] = true;
    } else {
        j["symbol"] = symbol_to_json(m.symbol);
        if (!m.extra.is_zero()) j["smoothing"] = rank_to_json(m.extra);
    }
    if (m.support_tag) j["support"] = cone_to_json(*m.support_tag);
    return j;
}

FamilyMember member_from_json(const Json& j, int dim, int rank) {
    FamilyMember m = member_zero(dim, rank);
    if (j.value("opaque", false)) {
        m.opaque = true;
    } else {
        if (!j.contains("symbol")) throw SchemaError("family member: missing symbol");
        m.symbol = symbol_from_json(j["symbol"]);
        if (m.symbol.dim != dim || m.symbol.size != rank)
            throw SchemaError("family member: symbol shape mismatch");
        if (j.contains("smoothing")) m.extra = rank_from_json(j["smoothing"], dim, rank);
    }
    if (j.contains("support")) m.support_tag = cone_from_json(j["support"], dim);
    return m;
}

}  // namespace

AlgebraElement AlgebraElement::zero(const GroupDescriptor& G, int dim) {
    return AlgebraElement{G, dim, {}};
}

AlgebraElement AlgebraElement::unit(const GroupDescriptor& G, int dim) {
    if (!group_is_finite(G))
        throw ExactDomainError("circle crossed product has no band-limited unit");
    AlgebraElement u{G, dim, {}};
    u.data[0] = TrigPolynomial::constant(dim, ExactScalar(finite_order(G)));
    return u;
}

AlgebraElement AlgebraElement::embed(const GroupDescriptor& G, const TrigPolynomial& f) {
    AlgebraElement a{G, f.dim, {}};
    if (group_is_finite(G)) {
        TrigPolynomial t = f.scaled(ExactScalar(finite_order(G)));
        if (!t.coef.empty()) a.data[0] = std::move(t);
    } else if (!f.coef.empty()) {
        a.data[0] = f;
    }
    return a;
}

TrigPolynomial AlgebraElement::at(long key) const {
    auto it = data.find(key);
    return it == data.end() ? TrigPolynomial(dim) : it->second;
}

AlgebraElement algebra_add(const AlgebraElement& a, const AlgebraElement& b) {
    check_same_group(a.G, b.G);
    AlgebraElement out{a.G, a.dim, a.data};
    for (const auto& [k, t] : b.data) {
        auto it = out.data.find(k);
        if (it == out.data.end())
            out.data.emplace(k, t);
        else {
            it->second = it->second + t;
            if (it->second.coef.empty()) out.data.erase(it);
        }
    }
    return out;
}

AlgebraElement algebra_scale(const AlgebraElement& a, const ExactScalar& c) {
    AlgebraElement out{a.G, a.dim, {}};
    if (c.is_zero()) return out;
    for (const auto& [k, t] : a.data) out.data.emplace(k, t.scaled(c));
    return out;
}

AlgebraElement convolve(const AlgebraElement& a, const AlgebraElement& b) {
    check_same_group(a.G, b.G);
    AlgebraElement out{a.G, a.dim, {}};
    auto acc = [&](long key, const TrigPolynomial& t) {
        if (t.coef.empty()) return;
        auto it = out.data.find(key);
        if (it == out.data.end())
            out.data.emplace(key, t);
        else {
            it->second = it->second + t;
            if (it->second.coef.empty()) out.data.erase(it);
        }
    };
    if (group_is_finite(a.G)) {
        long q = finite_order(a.G);
        ExactScalar inv_q{Rational(1, static_cast<unsigned long>(q))};
        for (long g = 0; g < q; ++g)
            for (const auto& [h, ah] : a.data) {
                long rest = ((g - h) % q + q) % q;
                auto itb = b.data.find(rest);
                if (itb == b.data.end()) continue;
                GroupElement hinv{false, ((q - h) % q)};
                TorusMap m = group_element_map(a.G, a.dim, hinv);
                acc(g, (ah * trig_precompose(itb->second, m)).scaled(inv_q));
            }
    } else {
        int axis = circle_axis(a.G);
        for (const auto& [n, bn] : b.data)
            for (const auto& [l, c] : bn.coef) {
                auto ita = a.data.find(n + l[axis]);
                if (ita == a.data.end()) continue;
                acc(n, ita->second * TrigPolynomial::mode(a.dim, l, c));
            }
    }
    return out;
}

AlgebraElement involution(const AlgebraElement& a) {
    AlgebraElement out{a.G, a.dim, {}};
    auto acc = [&](long key, const TrigPolynomial& t) {
        if (t.coef.empty()) return;
        auto it = out.data.find(key);
        if (it == out.data.end())
            out.data.emplace(key, t);
        else
            it->second = it->second + t;
    };
    if (group_is_finite(a.G)) {
        long q = finite_order(a.G);
        for (const auto& [p, t] : a.data) {
            // value lands at p^{-1} and is precomposed with the action of the
            // inverse of the new slot, which is p itself
            long pinv = (q - p) % q;
            TorusMap m = group_element_map(a.G, a.dim, GroupElement{false, p});
            acc(pinv, trig_precompose(t, m).conj());
        }
    } else {
        int axis = circle_axis(a.G);
        for (const auto& [n, t] : a.data)
            for (const auto& [l, c] : t.coef) {
                ZVec neg(l.size());
                for (size_t i = 0; i < l.size(); ++i) neg[i] = -l[i];
                acc(n + l[axis], TrigPolynomial::mode(a.dim, neg, c.conj()));
            }
    }
    return out;
}

bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
    return a.G == b.G && a.dim == b.dim && a.data == b.data;
}

void FiniteRankOp::add(const Key& k, const ExactScalar& c) {
    if (c.is_zero()) return;
    auto it = w.find(k);
    if (it == w.end())
        w.emplace(k, c);
    else {
        it->second = it->second + c;
        if (it->second.is_zero()) w.erase(it);
    }
}

FiniteRankOp rank_one(int dim, int rank, const ZVec& out_mode, int out_comp, const ZVec& in_mode,
                      int in_comp, const ExactScalar& weight) {
    FiniteRankOp f;
    f.dim = dim;
    f.rank = rank;
    f.add(FiniteRankOp::Key{out_mode, out_comp, in_mode, in_comp}, weight);
    return f;
}

FiniteRankOp finite_rank_add(const FiniteRankOp& a, const FiniteRankOp& b) {
    FiniteRankOp out = a;
    for (const auto& [k, c] : b.w) out.add(k, c);
    if (out.w.empty()) {
        out.dim = a.dim;
        out.rank = a.rank;
    }
    return out;
}

FiniteRankOp finite_rank_scale(const FiniteRankOp& a, const ExactScalar& c) {
    FiniteRankOp out;
    out.dim = a.dim;
    out.rank = a.rank;
    if (c.is_zero()) return out;
    for (const auto& [k, v] : a.w) out.w.emplace(k, v * c);
    return out;
}

FiniteRankOp finite_rank_compose(const FiniteRankOp& a, const FiniteRankOp& b) {
    FiniteRankOp out;
    out.dim = a.dim;
    out.rank = a.rank;
    for (const auto& [ka, va] : a.w)
        for (const auto& [kb, vb] : b.w) {
            if (!(ka.in_mode == kb.out_mode) || ka.in_comp != kb.out_comp) continue;
            out.add(FiniteRankOp::Key{ka.out_mode, ka.out_comp, kb.in_mode, kb.in_comp},
                    va * vb);
        }
    return out;
}

FiniteRankOp finite_rank_adjoint(const FiniteRankOp& a) {
    FiniteRankOp out;
    out.dim = a.dim;
    out.rank = a.rank;
    for (const auto& [k, v] : a.w)
        out.add(FiniteRankOp::Key{k.in_mode, k.in_comp, k.out_mode, k.out_comp}, v.conj());
    return out;
}

FiniteRankOp compose_symbol_rank(const MatrixSymbol& a, const FiniteRankOp& f) {
    FiniteRankOp out;
    out.dim = f.dim;
    out.rank = f.rank;
    for (const auto& [k, v] : f.w)
        for (int r = 0; r < a.size; ++r) {
            TrigPolynomial t = symbol_apply_to_mode(a.at(r, k.out_comp), k.out_mode);
            for (const auto& [mu, c] : t.coef)
                out.add(FiniteRankOp::Key{mu, r, k.in_mode, k.in_comp}, c * v);
        }
    return out;
}

FiniteRankOp compose_rank_symbol(const FiniteRankOp& f, const MatrixSymbol& b) {
    FiniteRankOp out;
    out.dim = f.dim;
    out.rank = f.rank;
    // <Op(b) e_{j,d}, e_{k,e}> is nonzero only for j = k - l over stored
    // x-modes l, so the sum stays finite
    for (const auto& [k, v] : f.w)
        for (int d = 0; d < b.size; ++d) {
            const PolyhomogeneousSymbol& s = b.at(k.in_comp, d);
            std::map<ZVec, PolyhomogeneousSymbol> slices = symbol_x_slices(s);
            for (const auto& [l, slice] : slices) {
                ZVec j(k.in_mode.size());
                for (size_t i = 0; i < j.size(); ++i) j[i] = k.in_mode[i] - l[i];
                TrigPolynomial t = symbol_apply_to_mode(slice, j);
                ExactScalar c = t.coefficient(k.in_mode);
                if (c.is_zero()) continue;
                out.add(FiniteRankOp::Key{k.out_mode, k.out_comp, j, d}, v * c);
            }
        }
    return out;
}

FiniteRankOp finite_rank_pullback(const FiniteRankOp& f, const TorusMap& m) {
    FiniteRankOp out;
    out.dim = f.dim;
    out.rank = f.rank;
    auto it_cols = matrix_inverse_transpose_cols(m.u_cols, f.dim);
    for (const auto& [k, v] : f.w) {
        ZVec om = mat_transpose_vec(it_cols, k.out_mode);
        ZVec im = mat_transpose_vec(it_cols, k.in_mode);
        ZVec diff(om.size());
        for (size_t i = 0; i < om.size(); ++i) diff[i] = om[i] - im[i];
        out.add(FiniteRankOp::Key{om, k.out_comp, im, k.in_comp},
                v * mode_phase(diff, m.v, true));
    }
    return out;
}

ExactScalar finite_rank_trace(const FiniteRankOp& f) {
    ExactScalar t;
    for (const auto& [k, v] : f.w)
        if (k.out_mode == k.in_mode && k.out_comp == k.in_comp) t = t + v;
    return t;
}

bool operator==(const FiniteRankOp& a, const FiniteRankOp& b) {
    return a.dim == b.dim && a.rank == b.rank && a.w == b.w;
}

SymbolFamily SymbolFamily::zero(const GroupDescriptor& G, int dim, int rank) {
    return SymbolFamily{G, dim, rank, {}, std::nullopt};
}

SymbolFamily SymbolFamily::unit(const GroupDescriptor& G, int dim, int rank) {
    return at_identity(G, MatrixSymbol::identity(rank, dim));
}

SymbolFamily SymbolFamily::at_identity(const GroupDescriptor& G, const MatrixSymbol& b) {
    SymbolFamily f{G, b.dim, b.size, {}, std::nullopt};
    FamilyMember m = member_zero(b.dim, b.size);
    if (group_is_finite(G)) {
        m.symbol = matrix_scale(b, ExactScalar(finite_order(G)));
        if (!member_zeroish(m)) f.members.emplace(0, std::move(m));
    } else {
        m.symbol = b;
        f.delta = std::move(m);
    }
    return f;
}

SymbolFamily SymbolFamily::at_identity(const GroupDescriptor& G, int dim, int rank,
                                       const FiniteRankOp& fr) {
    SymbolFamily f{G, dim, rank, {}, std::nullopt};
    FamilyMember m = member_zero(dim, rank);
    if (group_is_finite(G)) {
        m.extra = finite_rank_scale(fr, ExactScalar(finite_order(G)));
        if (!member_zeroish(m)) f.members.emplace(0, std::move(m));
    } else {
        m.extra = fr;
        f.delta = std::move(m);
    }
    return f;
}

SymbolFamily lift_to_family(const AlgebraElement& a) {
    SymbolFamily f{a.G, a.dim, 1, {}, std::nullopt};
    for (const auto& [key, t] : a.data) {
        FamilyMember m = member_zero(a.dim, 1);
        m.symbol.at(0, 0) = PolyhomogeneousSymbol::from_trig(a.dim, t);
        f.members.emplace(key, std::move(m));
    }
    return f;
}

SymbolFamily family_add(const SymbolFamily& p, const SymbolFamily& q) {
    check_same_group(p.G, q.G);
    if (p.rank != q.rank || p.dim != q.dim)
        throw ExactDomainError("family_add: shape mismatch");
    SymbolFamily out = p;
    for (const auto& [k, m] : q.members) accumulate_member(out.members, k, m, p.dim, p.rank);
    if (q.delta) {
        if (!out.delta) out.delta = member_zero(p.dim, p.rank);
        *out.delta = member_add(*out.delta, *q.delta);
        if (member_zeroish(*out.delta)) out.delta.reset();
    }
    return out;
}

SymbolFamily family_scale(const SymbolFamily& p, const ExactScalar& c) {
    SymbolFamily out{p.G, p.dim, p.rank, {}, std::nullopt};
    if (c.is_zero()) return out;
    for (const auto& [k, m] : p.members) out.members.emplace(k, member_scale(m, c));
    if (p.delta) out.delta = member_scale(*p.delta, c);
    return out;
}

SymbolFamily family_negate(const SymbolFamily& p) {
    return family_scale(p, ExactScalar(-1));
}

SymbolFamily family_convolve(const SymbolFamily& p, const SymbolFamily& q, int depth) {
    check_same_group(p.G, q.G);
    if (p.rank != q.rank || p.dim != q.dim)
        throw ExactDomainError("family_convolve: shape mismatch");
    SymbolFamily out{p.G, p.dim, p.rank, {}, std::nullopt};
    if (group_is_finite(p.G)) {
        long q_ord = finite_order(p.G);
        ExactScalar inv_q{Rational(1, static_cast<unsigned long>(q_ord))};
        for (const auto& [h, ph] : p.members) {
            require_transparent(ph, "family_convolve");
            TorusMap mh = group_element_map(p.G, p.dim, GroupElement{false, h});
            for (const auto& [j, qj] : q.members) {
                require_transparent(qj, "family_convolve");
                long g = (h + j) % q_ord;
                FamilyMember prod =
                    member_product(ph, member_pullback(qj, mh), depth);
                accumulate_member(out.members, g, member_scale(prod, inv_q), p.dim, p.rank);
            }
        }
    } else {
        int axis = circle_axis(p.G);
        auto slices_of = [&](const FamilyMember& m) {
            // symbol slices by x-mode, extra slices by mode difference
            std::map<long, FamilyMember> sl;
            for (auto& [l, ms] : matrix_x_slices(m.symbol)) {
                auto it = sl.find(l[axis]);
                if (it == sl.end()) it = sl.emplace(l[axis], member_zero(m.symbol.dim, m.symbol.size)).first;
                it->second.symbol = matrix_add(it->second.symbol, ms);
            }
            for (const auto& [key, v] : m.extra.w) {
                long l = key.out_mode[axis] - key.in_mode[axis];
                auto it = sl.find(l);
                if (it == sl.end()) it = sl.emplace(l, member_zero(m.extra.dim, m.extra.rank)).first;
                it->second.extra.add(key, v);
            }
            return sl;
        };
        if (p.delta) require_transparent(*p.delta, "family_convolve");
        if (q.delta) require_transparent(*q.delta, "family_convolve");
        // delta . delta
        if (p.delta && q.delta) {
            FamilyMember d = member_product(*p.delta, *q.delta, depth);
            if (!member_zeroish(d)) out.delta = std::move(d);
        }
        // delta . mode n stays at mode n
        if (p.delta)
            for (const auto& [n, qn] : q.members) {
                require_transparent(qn, "family_convolve");
                accumulate_member(out.members, n, member_product(*p.delta, qn, depth), p.dim,
                                  p.rank);
            }
        // mode m . delta lands at m - l_axis per x-slice
        if (q.delta) {
            auto sl = slices_of(*q.delta);
            for (const auto& [m, pm] : p.members) {
                require_transparent(pm, "family_convolve");
                for (const auto& [l, qs] : sl)
                    accumulate_member(out.members, m - l, member_product(pm, qs, depth), p.dim,
                                      p.rank);
            }
        }
        // mode . mode: result mode n collects P_{n + l_axis} . slice_l(Q_n)
        for (const auto& [n, qn] : q.members) {
            require_transparent(qn, "family_convolve");
            auto sl = slices_of(qn);
            for (const auto& [l, qs] : sl) {
                auto itp = p.members.find(n + l);
                if (itp == p.members.end()) continue;
                require_transparent(itp->second, "family_convolve");
                accumulate_member(out.members, n, member_product(itp->second, qs, depth), p.dim,
                                  p.rank);
            }
        }
    }
    return out;
}

SymbolFamily family_adjoint(const SymbolFamily& p, int depth) {
    SymbolFamily out{p.G, p.dim, p.rank, {}, std::nullopt};
    if (group_is_finite(p.G)) {
        long q = finite_order(p.G);
        for (const auto& [h, ph] : p.members) {
            require_transparent(ph, "family_adjoint");
            long hinv = (q - h) % q;
            TorusMap m = group_element_map(p.G, p.dim, GroupElement{false, hinv});
            accumulate_member(out.members, hinv,
                              member_pullback(member_adjoint(ph, depth), m), p.dim, p.rank);
        }
    } else {
        int axis = circle_axis(p.G);
        if (p.delta) {
            require_transparent(*p.delta, "family_adjoint");
            FamilyMember d = member_adjoint(*p.delta, depth);
            if (!member_zeroish(d)) out.delta = std::move(d);
        }
        for (const auto& [n, pn] : p.members) {
            require_transparent(pn, "family_adjoint");
            FamilyMember adj = member_adjoint(pn, depth);
            // split the adjoint by x-slice; slice l lands at mode n - l_axis
            for (auto& [l, ms] : matrix_x_slices(adj.symbol)) {
                FamilyMember piece = member_zero(p.dim, p.rank);
                piece.symbol = std::move(ms);
                accumulate_member(out.members, n - l[axis], piece, p.dim, p.rank);
            }
            for (const auto& [key, v] : adj.extra.w) {
                long l = key.out_mode[axis] - key.in_mode[axis];
                FamilyMember piece = member_zero(p.dim, p.rank);
                piece.extra.add(key, v);
                accumulate_member(out.members, n - l, piece, p.dim, p.rank);
            }
        }
    }
    return out;
}

bool operator==(const SymbolFamily& a, const SymbolFamily& b) {
    if (!(a.G == b.G) || a.dim != b.dim || a.rank != b.rank) return false;
    if (a.delta.has_value() != b.delta.has_value()) return false;
    if (a.delta && !member_equal(*a.delta, *b.delta)) return false;
    if (a.members.size() != b.members.size()) return false;
    for (const auto& [k, m] : a.members) {
        auto it = b.members.find(k);
        if (it == b.members.end() || !member_equal(m, it->second)) return false;
    }
    return true;
}

long family_order(const SymbolFamily& p) {
    bool seen = false;
    long order = 0;
    auto visit = [&](const FamilyMember& m) {
        if (m.opaque) return;
        for (const auto& e : m.symbol.entries) {
            if (e.is_exactly_zero()) continue;
            if (!seen || e.order > order) order = e.order;
            seen = true;
        }
    };
    for (const auto& [k, m] : p.members) visit(m);
    if (p.delta) visit(*p.delta);
    return order;
}

ModeImage act_on_mode(const SymbolFamily& p, const ZVec& k, int comp) {
    if (k.size() != static_cast<size_t>(p.dim))
        throw ExactDomainError("act_on_mode: mode length mismatch");
    if (comp < 0 || comp >= p.rank) throw ExactDomainError("act_on_mode: component out of range");
    ModeImage out;
    if (group_is_finite(p.G)) {
        long q = finite_order(p.G);
        ExactScalar inv_q{Rational(1, static_cast<unsigned long>(q))};
        for (const auto& [h, m] : p.members) {
            auto [k1, phase] = rho_on_mode(p.G, p.dim, GroupElement{false, h}, k);
            image_accumulate(out, apply_member(m, k1, comp, phase * inv_q));
        }
    } else {
        int axis = circle_axis(p.G);
        if (p.delta) image_accumulate(out, apply_member(*p.delta, k, comp, ExactScalar(1)));
        auto it = p.members.find(k[axis]);
        if (it != p.members.end())
            image_accumulate(out, apply_member(it->second, k, comp, ExactScalar(1)));
    }
    return out;
}

TraceReport family_trace(const SymbolFamily& p, long mode_cutoff) {
    if (mode_cutoff < 0) throw ExactDomainError("family_trace: negative cutoff");
    ExactScalar mode_sum;
    for_each_mode(p.dim, mode_cutoff, [&](const ZVec& k) {
        for (int comp = 0; comp < p.rank; ++comp) {
            ModeImage im = act_on_mode(p, k, comp);
            auto it = im.find(std::make_pair(k, comp));
            if (it != im.end()) mode_sum = mode_sum + it->second;
        }
    });

    // kernel route: Tr(B rho(g)) = sum_k phase(k) <B e_k, e_{U^T k}> summed
    // over the group, never applying rho to the input mode
    ExactScalar kernel_sum;
    if (group_is_finite(p.G)) {
        long q = finite_order(p.G);
        ExactScalar inv_q{Rational(1, static_cast<unsigned long>(q))};
        for (const auto& [h, m] : p.members) {
            TorusMap mh = group_element_map(p.G, p.dim, GroupElement{false, h});
            for_each_mode(p.dim, mode_cutoff, [&](const ZVec& k) {
                ZVec kt = mat_transpose_vec(mh.u_cols, k);
                ExactScalar phase = mode_phase(k, mh.v, true) * inv_q;
                for (int comp = 0; comp < p.rank; ++comp) {
                    ModeImage im = apply_member(m, k, comp, phase);
                    auto it = im.find(std::make_pair(kt, comp));
                    if (it != im.end()) kernel_sum = kernel_sum + it->second;
                }
            });
        }
    } else {
        int axis = circle_axis(p.G);
        for_each_mode(p.dim, mode_cutoff, [&](const ZVec& k) {
            for (int comp = 0; comp < p.rank; ++comp) {
                ModeImage im;
                if (p.delta) image_accumulate(im, apply_member(*p.delta, k, comp, ExactScalar(1)));
                auto it = p.members.find(k[axis]);
                if (it != p.members.end())
                    image_accumulate(im, apply_member(it->second, k, comp, ExactScalar(1)));
                auto d = im.find(std::make_pair(k, comp));
                if (d != im.end()) kernel_sum = kernel_sum + d->second;
            }
        });
    }
    TraceReport r;
    r.value = mode_sum;
    ExactScalar neg = kernel_sum + (mode_sum * ExactScalar(-1));
    r.discrepancy = neg;
    return r;
}

DiracOperator DiracOperator::flat(int dim) {
    if (dim != 1 && dim != 2)
        throw ExactDomainError("flat Dirac symbol provided for dims 1 and 2");
    DiracOperator d;
    d.grading = {1, -1};
    d.symbol = MatrixSymbol::zero_matrix(2, dim);
    auto axis_symbol = [&](int axis) {
        ZVec alpha(static_cast<size_t>(dim), 0);
        alpha[axis] = 1;
        XiPart p;
        p.L = laurent_monomial(alpha, ExactScalar(1));
        return PolyhomogeneousSymbol::from_xipart(dim, 1, p);
    };
    if (dim == 1) {
        d.symbol.at(0, 1) = axis_symbol(0);
        d.symbol.at(1, 0) = axis_symbol(0);
    } else {
        auto x1 = axis_symbol(0);
        auto ix2 = symbol_scale(axis_symbol(1), ExactScalar::i());
        d.symbol.at(0, 1) = symbol_add(x1, symbol_negate(ix2));
        d.symbol.at(1, 0) = symbol_add(x1, ix2);
    }
    XiPart norm;
    norm.M = laurent_monomial(ZVec(static_cast<size_t>(dim), 0), ExactScalar(1));
    d.absd = PolyhomogeneousSymbol::from_xipart(dim, 1, norm);

    // declared structure: odd against the grading, scalar square
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            if (d.grading[r] == d.grading[c] && !d.symbol.at(r, c).is_exactly_zero())
                throw ExactDomainError("flat Dirac symbol must be odd");
    // depth 3 exhausts the expansion of first-order entries, so the square
    // comes back certified exact
    MatrixSymbol sq = matrix_compose(d.symbol, d.symbol, 3);
    PolyhomogeneousSymbol n2 = symbol_mul(d.absd, d.absd);
    if (!(sq.at(0, 0) == n2) || !(sq.at(1, 1) == n2) || !sq.at(0, 1).is_exactly_zero() ||
        !sq.at(1, 0).is_exactly_zero())
        throw ExactDomainError("flat Dirac symbol must square to |xi|^2");
    return d;
}

Json algebra_to_json(const AlgebraElement& a) {
    Json j;
    j["group"] = group_to_json(a.G);
    j["dim"] = a.dim;
    Json data = Json::array();
    for (const auto& [key, t] : a.data) {
        Json row;
        row["key"] = key;
        row["value"] = trig_to_json(t);
        data.push_back(std::move(row));
    }
    j["data"] = std::move(data);
    return j;
}

AlgebraElement algebra_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("group") || !j.contains("dim") || !j.contains("data"))
        throw SchemaError("algebra element: expected {group, dim, data}");
    AlgebraElement a{group_from_json(j["group"]), j["dim"].get<int>(), {}};
    if (a.dim < 1 || a.dim > 8) throw SchemaError("algebra element: dim out of range");
    for (const auto& row : j["data"]) {
        long key = row.at("key").get<long>();
        TrigPolynomial t = trig_from_json(row.at("value"), a.dim);
        if (group_is_finite(a.G)) {
            long q = finite_order(a.G);
            if (key < 0 || key >= q) throw SchemaError("algebra element: key out of range");
        }
        if (!t.coef.empty()) a.data[key] = std::move(t);
    }
    return a;
}

Json family_to_json(const SymbolFamily& p) {
    Json j;
    j["group"] = group_to_json(p.G);
    j["dim"] = p.dim;
    j["rank"] = p.rank;
    Json members = Json::array();
    for (const auto& [key, m] : p.members) members.push_back(member_to_json(key, m, true));
    j["members"] = std::move(members);
    if (p.delta) j["delta"] = member_to_json(0, *p.delta, false);
    return j;
}

SymbolFamily family_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("group") || !j.contains("dim") || !j.contains("rank"))
        throw SchemaError("family: expected {group, dim, rank, members}");
    SymbolFamily p{group_from_json(j["group"]), j["dim"].get<int>(), j["rank"].get<int>(), {},
                   std::nullopt};
    if (p.dim < 1 || p.dim > 8) throw SchemaError("family: dim out of range");
    if (p.rank < 1 || p.rank > 16) throw SchemaError("family: rank out of range");
    if (j.contains("members"))
        for (const auto& row : j["members"]) {
            if (!row.contains("key")) throw SchemaError("family member: missing key");
            long key = row["key"].get<long>();
            if (group_is_finite(p.G)) {
                long q = finite_order(p.G);
                if (key < 0 || key >= q) throw SchemaError("family member: key out of range");
            }
            p.members[key] = member_from_json(row, p.dim, p.rank);
        }
    if (j.contains("delta")) {
        if (group_is_finite(p.G)) throw SchemaError("family: delta member needs a circle group");
        p.delta = member_from_json(j["delta"], p.dim, p.rank);
    }
    return p;
}

}  // namespace torcal
