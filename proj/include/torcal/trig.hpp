#pragma once

#include <map>

#include "torcal/zvec.hpp"

namespace torcal {

// Finite Fourier sum  sum_k c_k e^{i k.x}  on the n-torus (2*pi periodic).
struct TrigPolynomial {
    int dim = 1;
    std::map<ZVec, ExactScalar> coef;  // only nonzero entries

    TrigPolynomial() = default;
    explicit TrigPolynomial(int d) : dim(d) {}

    static TrigPolynomial constant(int dim, const ExactScalar& c);
    static TrigPolynomial mode(int dim, const ZVec& k, const ExactScalar& c = ExactScalar(1));

    bool is_zero() const { return coef.empty(); }

    void add_mode(const ZVec& k, const ExactScalar& c);

    TrigPolynomial conj() const;                      // complex conjugate
    TrigPolynomial translated(const std::vector<Rational>& v_over_2pi) const;
    // pullback along x -> U x for a signed-permutation integer matrix U
    TrigPolynomial pullback_linear(const std::vector<ZVec>& u_cols) const;
    ExactScalar coefficient(const ZVec& k) const;

    friend TrigPolynomial operator+(const TrigPolynomial& a, const TrigPolynomial& b);
    friend TrigPolynomial operator-(const TrigPolynomial& a, const TrigPolynomial& b);
    friend TrigPolynomial operator*(const TrigPolynomial& a, const TrigPolynomial& b);
    TrigPolynomial scaled(const ExactScalar& c) const;
    friend bool operator==(const TrigPolynomial& a, const TrigPolynomial& b) {
        return a.dim == b.dim && a.coef == b.coef;
    }
};

// e^{-i k.v} for v = 2*pi*r with rational vector r; exact in Q(i), so each
// k.r must be a multiple of 1/4 (else throws ExactDomainError).
ExactScalar mode_phase(const ZVec& k, const std::vector<Rational>& v_over_2pi, bool negate);

}  // namespace torcal
