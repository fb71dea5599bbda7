#include "torcal/series.hpp"

namespace torcal {

Taylor operator+(const Taylor& a, const Taylor& b) {
    Taylor r(std::min(a.len(), b.len()));
    for (size_t j = 0; j < r.len(); ++j) r.c[j] = a.c[j] + b.c[j];
    return r;
}

Taylor operator-(const Taylor& a, const Taylor& b) {
    Taylor r(std::min(a.len(), b.len()));
    for (size_t j = 0; j < r.len(); ++j) r.c[j] = a.c[j] - b.c[j];
    return r;
}

Taylor operator*(const Taylor& a, const Taylor& b) {
    Taylor r(std::min(a.len(), b.len()));
    for (size_t i = 0; i < r.len(); ++i)
        for (size_t j = 0; i + j < r.len(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
}

Taylor Taylor::scaled(const Real& s) const {
    Taylor r(len());
    for (size_t j = 0; j < len(); ++j) r.c[j] = c[j] * s;
    return r;
}

Taylor taylor_exp(const Taylor& a) {
    // exp(a0 + g) = exp(a0) * sum g^m / m!
    Taylor g = a;
    g.c[0] = Real(0);
    Taylor term = Taylor::constant(Real(1), a.len());
    Taylor acc = term;
    for (size_t m = 1; m < a.len(); ++m) {
        term = term * g;
        term = term.scaled(Real(1) / Real(static_cast<long>(m)));
        acc = acc + term;
    }
    return acc.scaled(exp(a.c[0]));
}

namespace {

// B_2 .. B_32 (even-index Bernoulli numbers)
const std::vector<Rational>& bernoulli_even() {
    static const std::vector<Rational> b = {
        Rational(1, 6),          Rational(-1, 30),        Rational(1, 42),
        Rational(-1, 30),        Rational(5, 66),         Rational(-691, 2730),
        Rational(7, 6),          Rational(-3617, 510),    Rational(43867, 798),
        Rational(-174611, 330),  Rational(854513, 138),   Rational("-236364091/2730"),
        Rational("8553103/6"),   Rational("-23749461029/870"),
        Rational("8615841276005/14322"), Rational("-7709321041217/510"),
    };
    return b;
}

}  // namespace

Real hurwitz_zeta(const Real& s, const Real& a) {
    // Euler-Maclaurin with K leading terms and J Bernoulli corrections.
    const long K = 48;
    const size_t J = 14;
    Real acc(0);
    for (long k = 0; k < K; ++k) acc += pow(a + Real(k), -s);
    Real aK = a + Real(K);
    acc += pow(aK, Real(1) - s) / (s - Real(1));
    acc += pow(aK, -s) / Real(2);
    // sum_j B_{2j}/(2j)! * (s)_{2j-1} * aK^{-s-2j+1}
    Real poch = s;               // (s)_1
    Real fact(2);                // (2j)! running, starts 2! = 2
    const auto& bern = bernoulli_even();
    for (size_t j = 1; j <= J; ++j) {
        acc += Real(bern[j - 1]) / fact * poch * pow(aK, -s - Real(static_cast<long>(2 * j - 1)));
        // update for next j: multiply pochhammer by (s+2j-1)(s+2j) and factorial by (2j+1)(2j+2)
        poch *= (s + Real(static_cast<long>(2 * j - 1))) * (s + Real(static_cast<long>(2 * j)));
        fact *= Real(static_cast<long>(2 * j + 1)) * Real(static_cast<long>(2 * j + 2));
    }
    return acc;
}

Real polygamma(int m, const Real& x) {
    if (m == 0) return digamma(x);
    // psi^{(m)}(x) = (-1)^{m+1} m! zeta_H(m+1, x)
    Real f(1);
    for (int j = 2; j <= m; ++j) f *= Real(j);
    Real z = hurwitz_zeta(Real(m + 1), x);
    Real v = f * z;
    return (m % 2 == 0) ? -v : v;
}

Taylor lngamma_taylor(const Real& x, size_t len) {
    Taylor t(len);
    t.c[0] = lngamma(x);
    if (len > 1) t.c[1] = digamma(x);
    Real fact(1);
    for (size_t j = 2; j < len; ++j) {
        fact *= Real(static_cast<long>(j));
        t.c[j] = polygamma(static_cast<int>(j - 1), x) / fact;
    }
    return t;
}

std::vector<Real> reciprocal_gamma_derivatives(const Rational& s, int maxorder) {
    const size_t len = static_cast<size_t>(maxorder) + 1;
    // Shift until the lnGamma expansion point is safely positive:
    // 1/Gamma(s+h) = prod_{j=0}^{M-1} (s+j+h) * 1/Gamma(s+M+h)
    long M = 0;
    Rational base = s;
    while (base < 1) {
        base += 1;
        ++M;
    }
    Taylor recip = taylor_exp(lngamma_taylor(Real(base), len).scaled(Real(-1)));
    for (long j = 0; j < M; ++j) {
        Taylor lin(len);
        lin.c[0] = Real(s + j);
        if (len > 1) lin.c[1] = Real(1);
        recip = recip * lin;
    }
    std::vector<Real> out(len);
    Real fact(1);
    for (size_t j = 0; j < len; ++j) {
        if (j > 1) fact *= Real(static_cast<long>(j));
        out[j] = recip.c[j] * fact;
    }
    return out;
}

std::vector<Real> gamma_derivatives(const Real& x, int maxorder) {
    const size_t len = static_cast<size_t>(maxorder) + 1;
    Taylor g = taylor_exp(lngamma_taylor(x, len));
    std::vector<Real> out(len);
    Real fact(1);
    for (size_t j = 0; j < len; ++j) {
        if (j > 1) fact *= Real(static_cast<long>(j));
        out[j] = g.c[j] * fact;
    }
    return out;
}

}  // namespace torcal
