#pragma once

#include <cstdint>
#include <vector>

#include "torcal/exact.hpp"

namespace torcal {

// lattice vector / multi-index (lexicographic order via std::vector)
using ZVec = std::vector<long>;

inline ZVec zvec_zero(int dim) { return ZVec(static_cast<size_t>(dim), 0); }

inline ZVec operator+(const ZVec& a, const ZVec& b) {
    ZVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline ZVec operator-(const ZVec& a, const ZVec& b) {
    ZVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline ZVec operator-(const ZVec& a) {
    ZVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

inline long zvec_total(const ZVec& a) {
    long s = 0;
    for (long x : a) s += x;
    return s;
}

inline Integer zvec_norm2(const ZVec& a) {
    Integer s = 0;
    for (long x : a) s += Integer(x) * Integer(x);
    return s;
}

inline bool zvec_is_zero(const ZVec& a) {
    for (long x : a)
        if (x != 0) return false;
    return true;
}

// alpha! for a nonnegative multi-index
inline Rational multiindex_factorial(const ZVec& a) {
    Rational f(1);
    for (long x : a)
        for (long j = 2; j <= x; ++j) f *= j;
    return f;
}

// k^alpha with integer exponents; zero base with negative exponent throws.
inline Rational zvec_pow(const ZVec& k, const ZVec& alpha) {
    Rational p(1);
    for (size_t i = 0; i < k.size(); ++i) {
        long e = alpha[i];
        if (e == 0) continue;
        if (k[i] == 0) {
            if (e < 0) throw ExactDomainError("evaluation at zero coordinate with negative exponent");
            return Rational(0);
        }
        Rational base(k[i]);
        Rational f(1);
        long n = e < 0 ? -e : e;
        for (long j = 0; j < n; ++j) f *= base;
        p *= (e < 0) ? Rational(1) / f : f;
    }
    return p;
}

// enumerate all multi-indices alpha >= 0 with |alpha| == total in dim slots
std::vector<ZVec> multiindices_of_weight(int dim, long total);

// all multi-indices with 0 <= |alpha| <= maxtotal
std::vector<ZVec> multiindices_up_to(int dim, long maxtotal);

}  // namespace torcal
