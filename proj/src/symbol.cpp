#include "torcal/symbol.hpp"

#include <algorithm>
#include <climits>

namespace torcal {

LaurentPoly laurent_zero() { return {}; }

LaurentPoly laurent_monomial(const ZVec& alpha, const ExactScalar& c) {
    LaurentPoly p;
    if (!c.is_zero()) p.emplace(alpha, c);
    return p;
}

bool laurent_is_zero(const LaurentPoly& p) { return p.empty(); }

void laurent_accumulate(LaurentPoly& into, const LaurentPoly& p, const ExactScalar& scale) {
    if (scale.is_zero()) return;
    for (const auto& [a, c] : p) {
        auto it = into.find(a);
        if (it == into.end()) {
            ExactScalar v = c * scale;
            if (!v.is_zero()) into.emplace(a, v);
        } else {
            it->second += c * scale;
            if (it->second.is_zero()) into.erase(it);
        }
    }
}

LaurentPoly laurent_add(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r = a;
    laurent_accumulate(r, b, ExactScalar(1));
    return r;
}

LaurentPoly laurent_scale(const LaurentPoly& a, const ExactScalar& c) {
    LaurentPoly r;
    if (c.is_zero()) return r;
    for (const auto& [al, v] : a) r.emplace(al, v * c);
    return r;
}

LaurentPoly laurent_mul(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r;
    for (const auto& [aa, ca] : a)
        for (const auto& [ab, cb] : b) {
            ZVec k = aa + ab;
            auto it = r.find(k);
            if (it == r.end()) {
                ExactScalar v = ca * cb;
                if (!v.is_zero()) r.emplace(std::move(k), v);
            } else {
                it->second += ca * cb;
                if (it->second.is_zero()) r.erase(it);
            }
        }
    return r;
}

LaurentPoly laurent_mul_monomial(const LaurentPoly& a, const ZVec& alpha, const ExactScalar& c) {
    LaurentPoly r;
    if (c.is_zero()) return r;
    for (const auto& [al, v] : a) r.emplace(al + alpha, v * c);
    return r;
}

LaurentPoly laurent_derivative(const LaurentPoly& a, int axis) {
    LaurentPoly r;
    for (const auto& [al, v] : a) {
        long e = al[static_cast<size_t>(axis)];
        if (e == 0) continue;
        ZVec b = al;
        b[static_cast<size_t>(axis)] = e - 1;
        ExactScalar c = v * ExactScalar(e);
        auto it = r.find(b);
        if (it == r.end())
            r.emplace(std::move(b), c);
        else
            it->second += c;
    }
    return r;
}

LaurentPoly laurent_conj(const LaurentPoly& a) {
    LaurentPoly r;
    for (const auto& [al, v] : a) r.emplace(al, v.conj());
    return r;
}

LaurentPoly laurent_norm2(int dim) {
    LaurentPoly w;
    for (int i = 0; i < dim; ++i) {
        ZVec a = zvec_zero(dim);
        a[static_cast<size_t>(i)] = 2;
        w.emplace(std::move(a), ExactScalar(1));
    }
    return w;
}

std::optional<LaurentPoly> laurent_divide_norm2(const LaurentPoly& a, int dim) {
    if (a.empty()) return LaurentPoly{};
    size_t last = static_cast<size_t>(dim - 1);
    if (dim == 1) {
        LaurentPoly q;
        for (const auto& [al, c] : a) q.emplace(ZVec{al[0] - 2}, c);
        return q;
    }
    long dmin = LONG_MAX;
    for (const auto& [al, c] : a) dmin = std::min(dmin, al[last]);
    LaurentPoly g;
    for (const auto& [al, c] : a) {
        ZVec b = al;
        b[last] -= dmin;
        g.emplace(std::move(b), c);
    }
    // divide by xi_n^2 + (xi_1^2 + ... + xi_{n-1}^2), monic in xi_n
    LaurentPoly q;
    while (!g.empty()) {
        long dtop = LONG_MIN;
        for (const auto& [al, c] : g) dtop = std::max(dtop, al[last]);
        if (dtop < 2) return std::nullopt;
        std::vector<std::pair<ZVec, ExactScalar>> tops;
        for (const auto& [al, c] : g)
            if (al[last] == dtop) tops.emplace_back(al, c);
        for (const auto& [al, c] : tops) {
            ZVec qa = al;
            qa[last] -= 2;
            q.emplace(qa, c);
            g.erase(al);
            for (size_t i = 0; i + 1 < static_cast<size_t>(dim); ++i) {
                ZVec ua = qa;
                ua[i] += 2;
                auto it = g.find(ua);
                if (it == g.end()) {
                    g.emplace(std::move(ua), -c);
                } else {
                    it->second -= c;
                    if (it->second.is_zero()) g.erase(it);
                }
            }
        }
    }
    LaurentPoly out;
    for (const auto& [al, c] : q) {
        ZVec b = al;
        b[last] += dmin;
        out.emplace(std::move(b), c);
    }
    return out;
}

ExactScalar laurent_eval(const LaurentPoly& a, const ZVec& k) {
    ExactScalar s;
    for (const auto& [al, c] : a) s += c * ExactScalar(zvec_pow(k, al));
    return s;
}

// --- xi parts ---------------------------------------------------------------

bool xipart_is_zero(const XiPart& p) { return p.L.empty() && p.M.empty(); }

namespace {

LaurentPoly laurent_norm2_pow(int dim, int e) {
    LaurentPoly r = laurent_monomial(zvec_zero(dim), ExactScalar(1));
    LaurentPoly w = laurent_norm2(dim);
    for (int i = 0; i < e; ++i) r = laurent_mul(r, w);
    return r;
}

}  // namespace

void xipart_reduce(XiPart& p, int dim) {
    if (xipart_is_zero(p)) {
        p.J = 0;
        return;
    }
    while (p.J > 0) {
        auto ql = laurent_divide_norm2(p.L, dim);
        if (!ql) break;
        auto qm = laurent_divide_norm2(p.M, dim);
        if (!qm) break;
        p.L = std::move(*ql);
        p.M = std::move(*qm);
        --p.J;
    }
}

XiPart xipart_add(const XiPart& a, const XiPart& b, int dim) {
    XiPart r;
    r.J = std::max(a.J, b.J);
    LaurentPoly wa = laurent_norm2_pow(dim, r.J - a.J);
    LaurentPoly wb = laurent_norm2_pow(dim, r.J - b.J);
    r.L = laurent_add(laurent_mul(a.L, wa), laurent_mul(b.L, wb));
    r.M = laurent_add(laurent_mul(a.M, wa), laurent_mul(b.M, wb));
    xipart_reduce(r, dim);
    return r;
}

XiPart xipart_scale(const XiPart& a, const ExactScalar& c) {
    if (c.is_zero()) return XiPart{};
    XiPart r;
    r.J = a.J;
    r.L = laurent_scale(a.L, c);
    r.M = laurent_scale(a.M, c);
    return r;
}

XiPart xipart_mul(const XiPart& a, const XiPart& b, int dim) {
    XiPart r;
    r.J = a.J + b.J;
    LaurentPoly w = laurent_norm2(dim);
    r.L = laurent_add(laurent_mul(a.L, b.L), laurent_mul(laurent_mul(a.M, b.M), w));
    r.M = laurent_add(laurent_mul(a.L, b.M), laurent_mul(a.M, b.L));
    xipart_reduce(r, dim);
    return r;
}

XiPart xipart_derivative(const XiPart& a, int axis, int dim) {
    if (xipart_is_zero(a)) return XiPart{};
    XiPart r;
    r.J = a.J + 1;
    LaurentPoly w = laurent_norm2(dim);
    ZVec ei = zvec_zero(dim);
    ei[static_cast<size_t>(axis)] = 1;
    r.L = laurent_add(laurent_mul(laurent_derivative(a.L, axis), w),
                      laurent_mul_monomial(a.L, ei, ExactScalar(-2L * a.J)));
    r.M = laurent_add(laurent_mul(laurent_derivative(a.M, axis), w),
                      laurent_mul_monomial(a.M, ei, ExactScalar(1 - 2L * a.J)));
    xipart_reduce(r, dim);
    return r;
}

XiPart xipart_conj(const XiPart& a) {
    XiPart r;
    r.J = a.J;
    r.L = laurent_conj(a.L);
    r.M = laurent_conj(a.M);
    return r;
}

XiPart xipart_mul_norm_power(const XiPart& a, long m, int dim) {
    if (xipart_is_zero(a)) return XiPart{};
    XiPart r = a;
    if (m % 2 != 0) {
        // multiply by |xi|: (L, M) -> (M w, L), same J
        LaurentPoly w = laurent_norm2(dim);
        LaurentPoly newL = laurent_mul(r.M, w);
        r.M = r.L;
        r.L = std::move(newL);
        m -= 1;
    }
    long half = m / 2;  // multiply by w^half
    if (half > 0) {
        long lower = std::min<long>(half, r.J);
        r.J -= static_cast<int>(lower);
        long rest = half - lower;
        if (rest > 0) {
            LaurentPoly wr = laurent_norm2_pow(dim, static_cast<int>(rest));
            r.L = laurent_mul(r.L, wr);
            r.M = laurent_mul(r.M, wr);
        }
    } else if (half < 0) {
        r.J += static_cast<int>(-half);
    }
    xipart_reduce(r, dim);
    return r;
}

XiPart xipart_inverse(const XiPart& a, int dim) {
    if (xipart_is_zero(a)) throw ExactDomainError("xi-part not invertible: zero");
    LaurentPoly w = laurent_norm2(dim);
    // rationalize the |xi| part first: 1/(L + M|xi|) = (L - M|xi|) / (L^2 - M^2|xi|^2)
    LaurentPoly num_l = a.L;
    LaurentPoly num_m = laurent_scale(a.M, ExactScalar(-1L));
    LaurentPoly n = laurent_add(laurent_mul(a.L, a.L),
                                laurent_scale(laurent_mul(laurent_mul(a.M, a.M), w),
                                              ExactScalar(-1L)));
    // the denominator must reduce to c * xi^beta * |xi|^(2t); peel |xi|^2 factors,
    // and rationalize complex coefficients once if peeling gets stuck
    int t = 0;
    bool conjugated = false;
    while (n.size() != 1) {
        // n == 0 means a vanishes on a half-line of each ray (a zero divisor)
        if (n.empty()) throw ExactDomainError("xi-part not invertible: zero divisor");
        if (auto quot = laurent_divide_norm2(n, dim)) {
            n = *quot;
            ++t;
            continue;
        }
        if (conjugated)
            throw ExactDomainError("xi-part not invertible in the exact fragment");
        LaurentPoly cn = laurent_conj(n);
        num_l = laurent_mul(num_l, cn);
        num_m = laurent_mul(num_m, cn);
        n = laurent_mul(n, cn);
        conjugated = true;
    }
    const ZVec beta = n.begin()->first;
    const ExactScalar cinv = ExactScalar(1) / n.begin()->second;
    LaurentPoly wj = laurent_norm2_pow(dim, a.J);
    XiPart r;
    r.J = t;
    r.L = laurent_mul(laurent_mul_monomial(num_l, -beta, cinv), wj);
    r.M = laurent_mul(laurent_mul_monomial(num_m, -beta, cinv), wj);
    xipart_reduce(r, dim);
    return r;
}

bool operator==(const XiPart& a, const XiPart& b) {
    return a.J == b.J && a.L == b.L && a.M == b.M;
}

ExactScalar xipart_eval(const XiPart& p, const ZVec& k, int dim) {
    (void)dim;
    Integer n2 = zvec_norm2(k);
    ExactScalar val = laurent_eval(p.L, k);
    if (!p.M.empty()) {
        ExactScalar mv = laurent_eval(p.M, k);
        if (!mv.is_zero()) {
            if (mpz_perfect_square_p(n2.get_mpz_t()) == 0)
                throw ExactDomainError("evaluation needs an irrational |k|");
            Integer root;
            mpz_sqrt(root.get_mpz_t(), n2.get_mpz_t());
            val += mv * ExactScalar(Rational(root));
        }
    }
    if (p.J > 0) {
        if (n2 == 0) throw ExactDomainError("singular evaluation at k = 0");
        Integer den = 1;
        for (int j = 0; j < p.J; ++j) den *= n2;
        val = val * ExactScalar(Rational(1) / Rational(den));
    }
    return val;
}

// --- polyhomogeneous symbols -------------------------------------------------

PolyhomogeneousSymbol PolyhomogeneousSymbol::zero(int dim) {
    PolyhomogeneousSymbol s;
    s.dim = dim;
    return s;
}

PolyhomogeneousSymbol PolyhomogeneousSymbol::constant(int dim, const ExactScalar& c) {
    return from_trig(dim, TrigPolynomial::constant(dim, c));
}

PolyhomogeneousSymbol PolyhomogeneousSymbol::from_trig(int dim, const TrigPolynomial& f) {
    PolyhomogeneousSymbol s;
    s.dim = dim;
    s.order = 0;
    std::vector<Atom> atoms;
    for (const auto& [k, c] : f.coef) {
        Atom a;
        a.xmode = k;
        a.xi.L = laurent_monomial(zvec_zero(dim), c);
        atoms.push_back(std::move(a));
    }
    if (!atoms.empty()) s.terms.emplace(0, std::move(atoms));
    return s;
}

PolyhomogeneousSymbol PolyhomogeneousSymbol::from_xipart(int dim, long degree, const XiPart& p) {
    for (const auto& [al, c] : p.L)
        if (zvec_total(al) != degree + 2L * p.J)
            throw ExactDomainError("inconsistent homogeneity in xi-part");
    for (const auto& [al, c] : p.M)
        if (zvec_total(al) != degree + 2L * p.J - 1)
            throw ExactDomainError("inconsistent homogeneity in xi-part");
    PolyhomogeneousSymbol s;
    s.dim = dim;
    s.order = degree;
    if (!xipart_is_zero(p)) {
        Atom a;
        a.xmode = zvec_zero(dim);
        a.xi = p;
        s.terms.emplace(degree, std::vector<Atom>{std::move(a)});
    }
    return s;
}

PolyhomogeneousSymbol PolyhomogeneousSymbol::norm_power(int dim, long m) {
    XiPart p;
    if (m % 2 == 0) {
        long half = m / 2;
        if (half >= 0) {
            p.L = laurent_norm2_pow(dim, static_cast<int>(half));
        } else {
            p.J = static_cast<int>(-half);
            p.L = laurent_monomial(zvec_zero(dim), ExactScalar(1));
        }
    } else {
        long half = (m - 1) / 2;  // |xi|^m = w^half |xi|
        if (half >= 0) {
            p.M = laurent_norm2_pow(dim, static_cast<int>(half));
        } else {
            p.J = static_cast<int>(-half);
            p.M = laurent_norm2_pow(dim, 0);
        }
    }
    return from_xipart(dim, m, p);
}

bool PolyhomogeneousSymbol::is_zero() const {
    for (const auto& [d, atoms] : terms)
        if (!atoms.empty()) return false;
    return true;
}

namespace {

std::string marker_key(const std::optional<ConicRegion>& m) {
    return m ? m->key() : std::string();
}

bool atom_less(const Atom& a, const Atom& b) {
    if (a.xmode != b.xmode) return a.xmode < b.xmode;
    return marker_key(a.marker) < marker_key(b.marker);
}

}  // namespace

void symbol_normalize(PolyhomogeneousSymbol& s) {
    std::map<long, std::vector<Atom>, std::greater<long>> out;
    for (auto& [deg, atoms] : s.terms) {
        if (s.tail && deg <= *s.tail) continue;
        std::map<std::pair<ZVec, std::string>, Atom> acc;
        for (Atom& a : atoms) {
            if (a.marker && a.marker->is_empty()) continue;
            if (a.marker && a.marker->is_full()) a.marker.reset();
            if (xipart_is_zero(a.xi)) continue;
            auto key = std::make_pair(a.xmode, marker_key(a.marker));
            auto it = acc.find(key);
            if (it == acc.end()) {
                acc.emplace(std::move(key), std::move(a));
            } else {
                it->second.xi = xipart_add(it->second.xi, a.xi, s.dim);
            }
        }
        std::vector<Atom> merged;
        for (auto& [k, a] : acc)
            if (!xipart_is_zero(a.xi)) merged.push_back(std::move(a));
        std::sort(merged.begin(), merged.end(), atom_less);
        if (!merged.empty()) {
            if (deg > s.order) s.order = deg;
            out.emplace(deg, std::move(merged));
        }
    }
    s.terms = std::move(out);
}

namespace {

std::optional<long> tail_max(const std::optional<long>& a, const std::optional<long>& b) {
    if (!a) return b;
    if (!b) return a;
    return std::max(*a, *b);
}

std::optional<long> tail_shift(const std::optional<long>& a, long by) {
    if (!a) return a;
    return *a + by;
}

}  // namespace

PolyhomogeneousSymbol symbol_add(const PolyhomogeneousSymbol& a, const PolyhomogeneousSymbol& b) {
    if (a.dim != b.dim) throw ExactDomainError("symbol dimension mismatch");
    // an exact zero is the additive identity; its nominal order carries no
    // information and must not widen the other operand's
    if (a.is_exactly_zero()) return b;
    if (b.is_exactly_zero()) return a;
    PolyhomogeneousSymbol r;
    r.dim = a.dim;
    r.order = std::max(a.order, b.order);
    r.tail = tail_max(a.tail, b.tail);
    r.terms = a.terms;
    for (const auto& [deg, atoms] : b.terms) {
        auto& dst = r.terms[deg];
        dst.insert(dst.end(), atoms.begin(), atoms.end());
    }
    symbol_normalize(r);
    return r;
}

PolyhomogeneousSymbol symbol_scale(const PolyhomogeneousSymbol& a, const ExactScalar& c) {
    PolyhomogeneousSymbol r = a;
    if (c.is_zero()) {
        r.terms.clear();
        return r;
    }
    for (auto& [deg, atoms] : r.terms)
        for (Atom& at : atoms) at.xi = xipart_scale(at.xi, c);
    return r;
}

PolyhomogeneousSymbol symbol_negate(const PolyhomogeneousSymbol& a) {
    return symbol_scale(a, ExactScalar(-1L));
}

namespace {

std::optional<ConicRegion> marker_intersect(const std::optional<ConicRegion>& a,
                                            const std::optional<ConicRegion>& b) {
    if (!a) return b;
    if (!b) return a;
    return a->intersect(*b);
}

}  // namespace

PolyhomogeneousSymbol symbol_mul(const PolyhomogeneousSymbol& a, const PolyhomogeneousSymbol& b) {
    if (a.dim != b.dim) throw ExactDomainError("symbol dimension mismatch");
    PolyhomogeneousSymbol r;
    r.dim = a.dim;
    r.order = a.order + b.order;
    r.tail = tail_max(tail_shift(a.tail, b.order), tail_shift(b.tail, a.order));
    for (const auto& [da, atomsa] : a.terms)
        for (const auto& [db, atomsb] : b.terms) {
            long deg = da + db;
            if (r.tail && deg <= *r.tail) continue;
            auto& dst = r.terms[deg];
            for (const Atom& x : atomsa)
                for (const Atom& y : atomsb) {
                    Atom p;
                    p.xmode = x.xmode + y.xmode;
                    p.marker = marker_intersect(x.marker, y.marker);
                    if (p.marker && p.marker->is_empty()) continue;
                    p.xi = xipart_mul(x.xi, y.xi, a.dim);
                    dst.push_back(std::move(p));
                }
        }
    symbol_normalize(r);
    return r;
}

PolyhomogeneousSymbol symbol_mul_trig(const PolyhomogeneousSymbol& a, const TrigPolynomial& f) {
    return symbol_mul(PolyhomogeneousSymbol::from_trig(a.dim, f), a);
}

PolyhomogeneousSymbol symbol_apply_marker(const PolyhomogeneousSymbol& a, const ConicRegion& c) {
    PolyhomogeneousSymbol r = a;
    for (auto& [deg, atoms] : r.terms)
        for (Atom& at : atoms) at.marker = marker_intersect(at.marker, c);
    symbol_normalize(r);
    return r;
}

PolyhomogeneousSymbol symbol_derivative_x(const PolyhomogeneousSymbol& a, int axis) {
    PolyhomogeneousSymbol r = a;
    for (auto& [deg, atoms] : r.terms)
        for (Atom& at : atoms)
            at.xi = xipart_scale(at.xi, ExactScalar::i() * ExactScalar(at.xmode[static_cast<size_t>(axis)]));
    symbol_normalize(r);
    return r;
}

PolyhomogeneousSymbol symbol_derivative_xi(const PolyhomogeneousSymbol& a, int axis) {
    PolyhomogeneousSymbol r;
    r.dim = a.dim;
    r.order = a.order - 1;
    r.tail = tail_shift(a.tail, -1);
    for (const auto& [deg, atoms] : a.terms) {
        std::vector<Atom> out;
        for (const Atom& at : atoms) {
            Atom d = at;
            d.xi = xipart_derivative(at.xi, axis, a.dim);
            if (!xipart_is_zero(d.xi)) out.push_back(std::move(d));
        }
        if (!out.empty()) r.terms.emplace(deg - 1, std::move(out));
    }
    symbol_normalize(r);
    return r;
}

PolyhomogeneousSymbol symbol_conj(const PolyhomogeneousSymbol& a) {
    PolyhomogeneousSymbol r = a;
    for (auto& [deg, atoms] : r.terms)
        for (Atom& at : atoms) {
            at.xmode = -at.xmode;
            at.xi = xipart_conj(at.xi);
        }
    symbol_normalize(r);
    return r;
}

PolyhomogeneousSymbol symbol_pullback(const PolyhomogeneousSymbol& a, const TorusMap& map) {
    int dim = a.dim;
    // require a signed permutation so |xi| and the canonical form survive
    std::vector<size_t> target(static_cast<size_t>(dim));
    std::vector<long> sign(static_cast<size_t>(dim));
    for (int j = 0; j < dim; ++j) {
        int hits = 0;
        for (int i = 0; i < dim; ++i) {
            long u = map.u_cols[static_cast<size_t>(j)][static_cast<size_t>(i)];
            if (u == 0) continue;
            if (u != 1 && u != -1) throw ExactDomainError("map is not a signed permutation");
            target[static_cast<size_t>(j)] = static_cast<size_t>(i);
            sign[static_cast<size_t>(j)] = u;
            ++hits;
        }
        if (hits != 1) throw ExactDomainError("map is not a signed permutation");
    }
    auto itcols = matrix_inverse_transpose_cols(map.u_cols, dim);
    auto apply_it = [&](const ZVec& v) {
        ZVec out = zvec_zero(dim);
        for (int j = 0; j < dim; ++j)
            for (int i = 0; i < dim; ++i)
                out[static_cast<size_t>(i)] += itcols[static_cast<size_t>(j)][static_cast<size_t>(i)] * v[static_cast<size_t>(j)];
        return out;
    };
    // substitute xi -> U^T xi in a Laurent polynomial: exponent beta with
    // beta[target[j]] = alpha[j], sign prod sign[j]^alpha[j]
    auto substitute = [&](const LaurentPoly& p) {
        LaurentPoly out;
        for (const auto& [al, c] : p) {
            ZVec beta = zvec_zero(dim);
            long neg = 0;
            for (int j = 0; j < dim; ++j) {
                beta[target[static_cast<size_t>(j)]] = al[static_cast<size_t>(j)];
                if (sign[static_cast<size_t>(j)] < 0 && (al[static_cast<size_t>(j)] % 2 != 0)) neg ^= 1;
            }
            ExactScalar v = neg ? -c : c;
            auto it = out.find(beta);
            if (it == out.end())
                out.emplace(std::move(beta), v);
            else
                it->second += v;
        }
        return out;
    };
    PolyhomogeneousSymbol r;
    r.dim = dim;
    r.order = a.order;
    r.tail = a.tail;
    for (const auto& [deg, atoms] : a.terms) {
        std::vector<Atom> out;
        for (const Atom& at : atoms) {
            Atom n;
            n.xmode = apply_it(at.xmode);
            ExactScalar phase = mode_phase(n.xmode, map.v, true);
            n.xi.J = at.xi.J;
            n.xi.L = laurent_scale(substitute(at.xi.L), phase);
            n.xi.M = laurent_scale(substitute(at.xi.M), phase);
            if (at.marker) n.marker = at.marker->linear_image(itcols);
            out.push_back(std::move(n));
        }
        r.terms.emplace(deg, std::move(out));
    }
    symbol_normalize(r);
    return r;
}

namespace {

// D_x^alpha scales each atom by xmode^alpha
PolyhomogeneousSymbol symbol_dx_power(const PolyhomogeneousSymbol& a, const ZVec& alpha) {
    if (zvec_is_zero(alpha)) return a;
    PolyhomogeneousSymbol r = a;
    for (auto& [deg, atoms] : r.terms)
        for (Atom& at : atoms) at.xi = xipart_scale(at.xi, ExactScalar(zvec_pow(at.xmode, alpha)));
    symbol_normalize(r);
    return r;
}

// memoized iterated xi-derivatives along multi-indices
class XiDerivativeTable {
  public:
    explicit XiDerivativeTable(const PolyhomogeneousSymbol& base) {
        table_.emplace(zvec_zero(base.dim), base);
    }

    const PolyhomogeneousSymbol& get(const ZVec& alpha) {
        auto it = table_.find(alpha);
        if (it != table_.end()) return it->second;
        int axis = 0;
        for (size_t i = 0; i < alpha.size(); ++i)
            if (alpha[i] > 0) {
                axis = static_cast<int>(i);
                break;
            }
        ZVec prev = alpha;
        prev[static_cast<size_t>(axis)] -= 1;
        PolyhomogeneousSymbol d = symbol_derivative_xi(get(prev), axis);
        return table_.emplace(alpha, std::move(d)).first->second;
    }

  private:
    std::map<ZVec, PolyhomogeneousSymbol> table_;
};

}  // namespace

namespace {

// no retained x-dependence anywhere in the expansion
bool symbol_xfree(const PolyhomogeneousSymbol& s) {
    for (const auto& [deg, atoms] : s.terms)
        for (const Atom& a : atoms)
            if (!zvec_is_zero(a.xmode)) return false;
    return true;
}

}  // namespace

PolyhomogeneousSymbol symbol_compose(const PolyhomogeneousSymbol& a,
                                     const PolyhomogeneousSymbol& b, int depth) {
    if (a.dim != b.dim) throw ExactDomainError("symbol dimension mismatch");
    if (depth < 1) throw ExactDomainError("composition depth must be positive");
    // every derivative level vanishes against x-free b: the expansion is the
    // plain product (exact, no window truncation)
    if (!b.tail && symbol_xfree(b)) return symbol_mul(a, b);
    PolyhomogeneousSymbol r = PolyhomogeneousSymbol::zero(a.dim);
    r.order = a.order + b.order;
    XiDerivativeTable da(a);
    bool exhausted = false;
    for (long j = 0; j < depth; ++j) {
        bool any = false;
        for (const ZVec& alpha : multiindices_of_weight(a.dim, j)) {
            const PolyhomogeneousSymbol& d = da.get(alpha);
            if (d.is_zero() && !d.tail) continue;
            any = true;
            PolyhomogeneousSymbol term = symbol_mul(d, symbol_dx_power(b, alpha));
            term = symbol_scale(term, ExactScalar(Rational(1) / multiindex_factorial(alpha)));
            r = symbol_add(r, term);
        }
        if (!any) {
            exhausted = true;
            break;
        }
    }
    if (r.tail && *r.tail > a.order + b.order - depth)
        throw ExactDomainError("input depth insufficient for requested composition depth");
    if (!exhausted) r.tail = tail_max(r.tail, a.order + b.order - depth);
    r.order = a.order + b.order;
    symbol_normalize(r);
    return r;
}

PolyhomogeneousSymbol symbol_adjoint(const PolyhomogeneousSymbol& a, int depth) {
    if (depth < 1) throw ExactDomainError("adjoint depth must be positive");
    // x-free symbols have exact adjoint conj(a)
    if (!a.tail && symbol_xfree(a)) return symbol_conj(a);
    PolyhomogeneousSymbol c = symbol_conj(a);
    PolyhomogeneousSymbol r = PolyhomogeneousSymbol::zero(a.dim);
    r.order = a.order;
    XiDerivativeTable dc(c);
    bool exhausted = false;
    for (long j = 0; j < depth; ++j) {
        bool any = false;
        for (const ZVec& alpha : multiindices_of_weight(a.dim, j)) {
            const PolyhomogeneousSymbol& d = dc.get(alpha);
            if (d.is_zero() && !d.tail) continue;
            any = true;
            PolyhomogeneousSymbol term = symbol_dx_power(d, alpha);
            term = symbol_scale(term, ExactScalar(Rational(1) / multiindex_factorial(alpha)));
            r = symbol_add(r, term);
        }
        if (!any) {
            exhausted = true;
            break;
        }
    }
    if (r.tail && *r.tail > a.order - depth)
        throw ExactDomainError("input depth insufficient for requested adjoint depth");
    if (!exhausted) r.tail = tail_max(r.tail, a.order - depth);
    r.order = a.order;
    symbol_normalize(r);
    return r;
}

TrigPolynomial symbol_apply_to_mode(const PolyhomogeneousSymbol& a, const ZVec& k) {
    TrigPolynomial out(a.dim);
    for (const auto& [deg, atoms] : a.terms)
        for (const Atom& at : atoms) {
            if (at.marker && !at.marker->contains_lattice(k)) continue;
            ExactScalar v = xipart_eval(at.xi, k, a.dim);
            if (!v.is_zero()) out.add_mode(k + at.xmode, v);
        }
    return out;
}

namespace {

// Coarse bound: union of markers, full as soon as an unmarked atom appears.
ConicRegion level_support_coarse(int dim, const std::vector<Atom>& atoms) {
    ConicRegion acc = ConicRegion::empty(dim);
    for (const Atom& at : atoms) {
        if (!at.marker) return ConicRegion::full(dim);
        acc = acc.unite(*at.marker);
    }
    return acc;
}

// Sharp bound for one homogeneity level.  A direction is outside the support
// only when the atoms active near it cancel identically, so we walk the cells
// of the marker arrangement and keep every cell whose active sum is nonzero.
// Cells built from closures overlap on marker boundaries, which only enlarges
// the result (still a sound bound).
ConicRegion level_support(int dim, const std::vector<Atom>& atoms) {
    std::vector<ConicRegion> markers;
    for (const Atom& at : atoms) {
        if (!at.marker) continue;
        bool seen = false;
        for (const auto& m : markers)
            if (m == *at.marker) seen = true;
        if (!seen) markers.push_back(*at.marker);
    }
    if (markers.size() > 10) return level_support_coarse(dim, atoms);
    ConicRegion out = ConicRegion::empty(dim);
    const size_t n = markers.size();
    for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
        ConicRegion cell = ConicRegion::full(dim);
        for (size_t i = 0; i < n; ++i)
            cell = cell.intersect(mask >> i & 1 ? markers[i]
                                                : markers[i].complement_closure());
        if (cell.is_empty()) continue;
        std::map<ZVec, XiPart> sums;
        for (const Atom& at : atoms) {
            bool active = !at.marker;
            if (at.marker)
                for (size_t i = 0; i < n; ++i)
                    if ((mask >> i & 1) && markers[i] == *at.marker) active = true;
            if (!active) continue;
            auto it = sums.find(at.xmode);
            if (it == sums.end())
                sums.emplace(at.xmode, at.xi);
            else
                it->second = xipart_add(it->second, at.xi, dim);
        }
        bool nonzero = false;
        for (const auto& [m, x] : sums)
            if (!xipart_is_zero(x)) nonzero = true;
        if (nonzero) out = out.unite(cell);
    }
    return out;
}

}  // namespace

ConicRegion symbol_essential_support(const PolyhomogeneousSymbol& a) {
    ConicRegion acc = ConicRegion::empty(a.dim);
    for (const auto& [deg, atoms] : a.terms) {
        try {
            acc = acc.unite(level_support(a.dim, atoms));
        } catch (const ExactDomainError&) {
            // arrangement not expressible in this dimension fragment
            acc = acc.unite(level_support_coarse(a.dim, atoms));
        }
    }
    return acc;
}

bool operator==(const PolyhomogeneousSymbol& a, const PolyhomogeneousSymbol& b) {
    if (a.dim != b.dim || a.tail != b.tail) return false;
    if (a.terms.size() != b.terms.size()) return false;
    auto ita = a.terms.begin();
    auto itb = b.terms.begin();
    for (; ita != a.terms.end(); ++ita, ++itb) {
        if (ita->first != itb->first) return false;
        if (ita->second.size() != itb->second.size()) return false;
        for (size_t i = 0; i < ita->second.size(); ++i) {
            const Atom& x = ita->second[i];
            const Atom& y = itb->second[i];
            if (x.xmode != y.xmode || !(x.xi == y.xi)) return false;
            if (x.marker.has_value() != y.marker.has_value()) return false;
            if (x.marker && !(*x.marker == *y.marker)) return false;
        }
    }
    return true;
}

PolyhomogeneousSymbol symbol_invert_principal(const PolyhomogeneousSymbol& a) {
    if (a.terms.empty()) throw ExactDomainError("no principal part to invert");
    long top = a.terms.begin()->first;
    const std::vector<Atom>& atoms = a.terms.begin()->second;
    if (atoms.size() != 1)
        throw ExactDomainError("principal part is not a single invertible atom");
    const Atom& at = atoms.front();
    Atom inv;
    inv.xmode = -at.xmode;
    inv.marker = at.marker;
    inv.xi = xipart_inverse(at.xi, a.dim);
    PolyhomogeneousSymbol r;
    r.dim = a.dim;
    r.order = -top;
    r.terms.emplace(-top, std::vector<Atom>{std::move(inv)});
    symbol_normalize(r);
    return r;
}

// --- matrices ----------------------------------------------------------------

MatrixSymbol MatrixSymbol::identity(int size, int dim) {
    MatrixSymbol m = zero_matrix(size, dim);
    for (int i = 0; i < size; ++i)
        m.at(i, i) = PolyhomogeneousSymbol::constant(dim, ExactScalar(1));
    return m;
}

MatrixSymbol MatrixSymbol::zero_matrix(int size, int dim) {
    MatrixSymbol m;
    m.size = size;
    m.dim = dim;
    m.entries.assign(static_cast<size_t>(size) * static_cast<size_t>(size),
                     PolyhomogeneousSymbol::zero(dim));
    return m;
}

const PolyhomogeneousSymbol& MatrixSymbol::at(int r, int c) const {
    return entries[static_cast<size_t>(r) * static_cast<size_t>(size) + static_cast<size_t>(c)];
}

PolyhomogeneousSymbol& MatrixSymbol::at(int r, int c) {
    return entries[static_cast<size_t>(r) * static_cast<size_t>(size) + static_cast<size_t>(c)];
}

MatrixSymbol matrix_add(const MatrixSymbol& a, const MatrixSymbol& b) {
    if (a.size != b.size || a.dim != b.dim) throw ExactDomainError("matrix shape mismatch");
    MatrixSymbol r = a;
    for (size_t i = 0; i < r.entries.size(); ++i) r.entries[i] = symbol_add(r.entries[i], b.entries[i]);
    return r;
}

MatrixSymbol matrix_negate(const MatrixSymbol& a) {
    MatrixSymbol r = a;
    for (auto& e : r.entries) e = symbol_negate(e);
    return r;
}

MatrixSymbol matrix_compose(const MatrixSymbol& a, const MatrixSymbol& b, int depth) {
    if (a.size != b.size || a.dim != b.dim) throw ExactDomainError("matrix shape mismatch");
    MatrixSymbol r = MatrixSymbol::zero_matrix(a.size, a.dim);
    for (int i = 0; i < a.size; ++i)
        for (int j = 0; j < a.size; ++j) {
            PolyhomogeneousSymbol s = PolyhomogeneousSymbol::zero(a.dim);
            for (int k = 0; k < a.size; ++k)
                s = symbol_add(s, symbol_compose(a.at(i, k), b.at(k, j), depth));
            r.at(i, j) = std::move(s);
        }
    return r;
}

MatrixSymbol matrix_adjoint(const MatrixSymbol& a, int depth) {
    MatrixSymbol r = MatrixSymbol::zero_matrix(a.size, a.dim);
    for (int i = 0; i < a.size; ++i)
        for (int j = 0; j < a.size; ++j) r.at(i, j) = symbol_adjoint(a.at(j, i), depth);
    return r;
}

bool operator==(const MatrixSymbol& a, const MatrixSymbol& b) {
    if (a.size != b.size || a.dim != b.dim) return false;
    for (size_t i = 0; i < a.entries.size(); ++i)
        if (!(a.entries[i] == b.entries[i])) return false;
    return true;
}

}  // namespace torcal
