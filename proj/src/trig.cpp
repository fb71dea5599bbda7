#include "torcal/trig.hpp"

namespace torcal {

std::vector<ZVec> multiindices_of_weight(int dim, long total) {
    std::vector<ZVec> out;
    ZVec cur(static_cast<size_t>(dim), 0);
    // lexicographic recursion
    auto rec = [&](auto&& self, int pos, long rem) -> void {
        if (pos == dim - 1) {
            cur[static_cast<size_t>(pos)] = rem;
            out.push_back(cur);
            return;
        }
        for (long v = 0; v <= rem; ++v) {
            cur[static_cast<size_t>(pos)] = v;
            self(self, pos + 1, rem - v);
        }
    };
    if (dim == 0) return out;
    rec(rec, 0, total);
    return out;
}

std::vector<ZVec> multiindices_up_to(int dim, long maxtotal) {
    std::vector<ZVec> out;
    for (long t = 0; t <= maxtotal; ++t) {
        auto w = multiindices_of_weight(dim, t);
        out.insert(out.end(), w.begin(), w.end());
    }
    return out;
}

TrigPolynomial TrigPolynomial::constant(int dim, const ExactScalar& c) {
    TrigPolynomial p(dim);
    p.add_mode(zvec_zero(dim), c);
    return p;
}

TrigPolynomial TrigPolynomial::mode(int dim, const ZVec& k, const ExactScalar& c) {
    TrigPolynomial p(dim);
    p.add_mode(k, c);
    return p;
}

void TrigPolynomial::add_mode(const ZVec& k, const ExactScalar& c) {
    if (c.is_zero()) return;
    auto it = coef.find(k);
    if (it == coef.end()) {
        coef.emplace(k, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) coef.erase(it);
    }
}

TrigPolynomial TrigPolynomial::conj() const {
    TrigPolynomial p(dim);
    for (const auto& [k, c] : coef) p.add_mode(-k, c.conj());
    return p;
}

ExactScalar mode_phase(const ZVec& k, const std::vector<Rational>& v_over_2pi, bool negate) {
    Rational dot(0);
    for (size_t i = 0; i < k.size(); ++i) dot += Rational(k[i]) * v_over_2pi[i];
    // e^{+-2 pi i dot}: representable in Q(i) iff 4*dot is an integer
    Rational q4 = dot * 4;
    if (q4.get_den() != 1)
        throw ExactDomainError("group phase outside Q(i): translation not representable");
    long quarter = static_cast<long>(mpz_get_si(q4.get_num().get_mpz_t()));
    return ExactScalar::i_pow(negate ? -quarter : quarter);
}

TrigPolynomial TrigPolynomial::translated(const std::vector<Rational>& v_over_2pi) const {
    // f(x - v): coefficient c_k picks e^{-i k.v}
    TrigPolynomial p(dim);
    for (const auto& [k, c] : coef) p.add_mode(k, c * mode_phase(k, v_over_2pi, true));
    return p;
}

TrigPolynomial TrigPolynomial::pullback_linear(const std::vector<ZVec>& u_cols) const {
    // f(Ux): e^{i k.(Ux)} = e^{i (U^T k).x}
    TrigPolynomial p(dim);
    for (const auto& [k, c] : coef) {
        ZVec kt(static_cast<size_t>(dim), 0);
        for (size_t j = 0; j < kt.size(); ++j) {
            long s = 0;
            for (size_t i = 0; i < kt.size(); ++i) s += k[i] * u_cols[j][i];
            kt[j] = s;
        }
        p.add_mode(kt, c);
    }
    return p;
}

ExactScalar TrigPolynomial::coefficient(const ZVec& k) const {
    auto it = coef.find(k);
    return it == coef.end() ? ExactScalar() : it->second;
}

TrigPolynomial operator+(const TrigPolynomial& a, const TrigPolynomial& b) {
    TrigPolynomial p = a;
    for (const auto& [k, c] : b.coef) p.add_mode(k, c);
    return p;
}

TrigPolynomial operator-(const TrigPolynomial& a, const TrigPolynomial& b) {
    TrigPolynomial p = a;
    for (const auto& [k, c] : b.coef) p.add_mode(k, -c);
    return p;
}

TrigPolynomial operator*(const TrigPolynomial& a, const TrigPolynomial& b) {
    TrigPolynomial p(a.dim);
    for (const auto& [k1, c1] : a.coef)
        for (const auto& [k2, c2] : b.coef) p.add_mode(k1 + k2, c1 * c2);
    return p;
}

TrigPolynomial TrigPolynomial::scaled(const ExactScalar& c) const {
    TrigPolynomial p(dim);
    if (c.is_zero()) return p;
    for (const auto& [k, v] : coef) p.add_mode(k, v * c);
    return p;
}

}  // namespace torcal
