#pragma once

#include <mpfr.h>

#include <string>

#include "torcal/exact.hpp"

namespace torcal {

// Extended-precision real, value semantics over mpfr_t.
// Working precision defaults to 256 bits (~77 decimal digits) and can be
// overridden with the TORCAL_PREC_DIGITS environment variable.
class Real {
  public:
    static mpfr_prec_t working_precision();

    Real() { mpfr_init2(v_, working_precision()); mpfr_set_zero(v_, 1); }
    Real(long x) : Real() { mpfr_set_si(v_, x, MPFR_RNDN); }
    Real(int x) : Real(static_cast<long>(x)) {}
    Real(double x) : Real() { mpfr_set_d(v_, x, MPFR_RNDN); }
    Real(const Rational& q) : Real() { mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN); }
    explicit Real(const std::string& s) : Real() {
        if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0)
            throw ExactDomainError("bad real literal: " + s);
    }

    Real(const Real& o) : Real() { mpfr_set(v_, o.v_, MPFR_RNDN); }
    Real(Real&& o) noexcept { mpfr_init2(v_, working_precision()); mpfr_swap(v_, o.v_); }
    Real& operator=(const Real& o) {
        if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    std::string str(int digits = 50) const;

    bool is_zero() const { return mpfr_zero_p(v_); }
    int sign() const { return mpfr_sgn(v_); }

    Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

    friend Real operator+(Real a, const Real& b) { return a += b; }
    friend Real operator-(Real a, const Real& b) { return a -= b; }
    friend Real operator*(Real a, const Real& b) { return a *= b; }
    friend Real operator/(Real a, const Real& b) { return a /= b; }
    friend Real operator-(const Real& a) {
        Real r;
        mpfr_neg(r.v_, a.v_, MPFR_RNDN);
        return r;
    }

    friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_); }
    friend bool operator!=(const Real& a, const Real& b) { return !mpfr_equal_p(a.v_, b.v_); }

  private:
    mpfr_t v_;
};

Real real_pi();
Real real_euler();  // Euler-Mascheroni

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real pow(const Real& x, const Real& y);
Real pow(const Real& x, long n);
Real gamma(const Real& x);
Real lngamma(const Real& x);  // x > 0
Real digamma(const Real& x);
// upper incomplete gamma Γ(a, x)
Real gamma_upper(const Real& a, const Real& x);

Real real_from_exact(const ExactConstant& c);

}  // namespace torcal
