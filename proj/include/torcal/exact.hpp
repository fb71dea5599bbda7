#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>

namespace torcal {

using Rational = mpq_class;
using Integer = mpz_class;

// Thrown when an operation leaves the exact domain (division by zero,
// irrational evaluation, unrepresentable group phase, ...).
struct ExactDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Rational rational_from_string(const std::string& s);
std::string rational_to_string(const Rational& q);

// Element of Q(i).
struct ExactScalar {
    Rational re, im;

    ExactScalar() : re(0), im(0) {}
    ExactScalar(long r) : re(r), im(0) {}
    ExactScalar(const Rational& r) : re(r), im(0) {}
    ExactScalar(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    static ExactScalar i() { return ExactScalar(Rational(0), Rational(1)); }
    // i^k for any integer k
    static ExactScalar i_pow(long k);

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    ExactScalar conj() const { return ExactScalar(re, -im); }

    ExactScalar& operator+=(const ExactScalar& o);
    ExactScalar& operator-=(const ExactScalar& o);
    ExactScalar& operator*=(const ExactScalar& o);
    ExactScalar& operator/=(const ExactScalar& o);

    friend ExactScalar operator+(ExactScalar a, const ExactScalar& b) { return a += b; }
    friend ExactScalar operator-(ExactScalar a, const ExactScalar& b) { return a -= b; }
    friend ExactScalar operator*(ExactScalar a, const ExactScalar& b) { return a *= b; }
    friend ExactScalar operator/(ExactScalar a, const ExactScalar& b) { return a /= b; }
    friend ExactScalar operator-(const ExactScalar& a) { return ExactScalar(-a.re, -a.im); }
    friend bool operator==(const ExactScalar& a, const ExactScalar& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const ExactScalar& a, const ExactScalar& b) { return !(a == b); }
};

std::string format_exact(const ExactScalar& v);
ExactScalar parse_exact(const std::string& s);

// coeff * pi^(pi_half/2); exact carrier for cosphere integrals and residues.
struct ExactConstant {
    Rational coeff;
    int pi_half = 0;  // exponent of sqrt(pi)

    ExactConstant() : coeff(0) {}
    ExactConstant(Rational c, int ph) : coeff(std::move(c)), pi_half(coeff == 0 ? 0 : ph) {}

    bool is_zero() const { return coeff == 0; }

    friend ExactConstant operator*(const ExactConstant& a, const ExactConstant& b) {
        return ExactConstant(a.coeff * b.coeff, a.pi_half + b.pi_half);
    }
    friend ExactConstant operator+(const ExactConstant& a, const ExactConstant& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.pi_half != b.pi_half)
            throw ExactDomainError("ExactConstant: incompatible pi powers in sum");
        return ExactConstant(a.coeff + b.coeff, a.pi_half);
    }
    friend ExactConstant operator/(const ExactConstant& a, const ExactConstant& b) {
        if (b.is_zero()) throw ExactDomainError("ExactConstant: division by zero");
        return ExactConstant(a.coeff / b.coeff, a.pi_half - b.pi_half);
    }
    friend bool operator==(const ExactConstant& a, const ExactConstant& b) {
        return a.coeff == b.coeff && (a.coeff == 0 || a.pi_half == b.pi_half);
    }
};

std::string format_exact(const ExactConstant& v);
ExactConstant parse_exact_constant(const std::string& s);

// Gamma(n + 1/2) = coeff * sqrt(pi) as an ExactConstant; n >= 0.
ExactConstant gamma_half_integer(long n);
// Gamma at a positive integer, as an exact constant.
ExactConstant gamma_integer(long n);

}  // namespace torcal
