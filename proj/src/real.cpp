#include "torcal/real.hpp"

#include <cstdlib>
#include <cstring>

namespace torcal {

mpfr_prec_t Real::working_precision() {
    static mpfr_prec_t prec = [] {
        long digits = 77;
        if (const char* env = std::getenv("TORCAL_PREC_DIGITS")) {
            long d = std::strtol(env, nullptr, 10);
            if (d >= 50 && d <= 10000) digits = d;
        }
        return static_cast<mpfr_prec_t>(static_cast<double>(digits) * 3.3220 + 16);
    }();
    return prec;
}

std::string Real::str(int digits) const {
    char* s = nullptr;
    // mpfr_asprintf handles rounding to the requested significant digits
    if (mpfr_asprintf(&s, "%.*Rg", digits, v_) < 0) return "<fmt-error>";
    std::string out(s);
    mpfr_free_str(s);
    return out;
}

Real real_pi() {
    Real r;
    mpfr_const_pi(r.raw(), MPFR_RNDN);
    return r;
}

Real real_euler() {
    Real r;
    mpfr_const_euler(r.raw(), MPFR_RNDN);
    return r;
}

#define TORCAL_REAL_UNARY(name, fn)          \
    Real name(const Real& x) {               \
        Real r;                              \
        fn(r.raw(), x.raw(), MPFR_RNDN);     \
        return r;                            \
    }

TORCAL_REAL_UNARY(abs, mpfr_abs)
TORCAL_REAL_UNARY(sqrt, mpfr_sqrt)
TORCAL_REAL_UNARY(exp, mpfr_exp)
TORCAL_REAL_UNARY(log, mpfr_log)
TORCAL_REAL_UNARY(sin, mpfr_sin)
TORCAL_REAL_UNARY(cos, mpfr_cos)
TORCAL_REAL_UNARY(gamma, mpfr_gamma)
TORCAL_REAL_UNARY(lngamma, mpfr_lngamma)
TORCAL_REAL_UNARY(digamma, mpfr_digamma)

#undef TORCAL_REAL_UNARY

Real pow(const Real& x, const Real& y) {
    Real r;
    mpfr_pow(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
    return r;
}

Real pow(const Real& x, long n) {
    Real r;
    mpfr_pow_si(r.raw(), x.raw(), n, MPFR_RNDN);
    return r;
}

Real gamma_upper(const Real& a, const Real& x) {
    Real r;
    mpfr_gamma_inc(r.raw(), a.raw(), x.raw(), MPFR_RNDN);
    return r;
}

Real real_from_exact(const ExactConstant& c) {
    Real base(c.coeff);
    if (c.pi_half == 0) return base;
    Real pi = real_pi();
    if (c.pi_half % 2 == 0) return base * pow(pi, static_cast<long>(c.pi_half / 2));
    return base * pow(pi, static_cast<long>((c.pi_half - 1) / 2)) * sqrt(pi);
}

}  // namespace torcal
