#pragma once

#include <vector>

#include "torcal/real.hpp"

namespace torcal {

// Truncated Taylor series sum c[j] h^j, fixed length.
struct Taylor {
    std::vector<Real> c;

    explicit Taylor(size_t len) : c(len) {}
    size_t len() const { return c.size(); }

    static Taylor constant(const Real& a, size_t len) {
        Taylor t(len);
        t.c[0] = a;
        return t;
    }

    friend Taylor operator+(const Taylor& a, const Taylor& b);
    friend Taylor operator-(const Taylor& a, const Taylor& b);
    friend Taylor operator*(const Taylor& a, const Taylor& b);
    Taylor scaled(const Real& s) const;
};

// exp of a series (general constant term).
Taylor taylor_exp(const Taylor& a);

// Hurwitz zeta sum_{k>=0} (a+k)^{-s} for real s > 1, a > 0, via Euler-Maclaurin.
Real hurwitz_zeta(const Real& s, const Real& a);

// polygamma psi^{(m)}(x), m >= 0, x > 0
Real polygamma(int m, const Real& x);

// Taylor coefficients (d/dh)^j/j! at h=0 of ln Gamma(x+h), x > 0, j=0..len-1.
Taylor lngamma_taylor(const Real& x, size_t len);

// derivatives (not divided by j!) of 1/Gamma at rational s (any sign),
// orders 0..maxorder.
std::vector<Real> reciprocal_gamma_derivatives(const Rational& s, int maxorder);

// derivatives of Gamma at x > 0, orders 0..maxorder.
std::vector<Real> gamma_derivatives(const Real& x, int maxorder);

}  // namespace torcal
