#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "torcal/exact.hpp"
#include "torcal/real.hpp"
#include "torcal/series.hpp"

#include <cmath>

using namespace torcal;

namespace {

double approx(const Real& r) { return r.to_double(); }

bool close(const Real& a, double b, double tol = 1e-40) {
    return std::abs(approx(a - Real(b))) < tol || std::abs(approx(a) - b) < tol;
}

}  // namespace

TEST_CASE("gaussian rational scalar arithmetic") {
    ExactScalar a(Rational(1, 2), Rational(3, 4));
    ExactScalar b(Rational(-1, 3), Rational(1, 6));
    ExactScalar s = a + b;
    CHECK(s.re == Rational(1, 6));
    CHECK(s.im == Rational(11, 12));

    ExactScalar p = a * b;
    // (1/2 + 3/4 i)(-1/3 + 1/6 i) = -1/6 - 1/8 + i(1/12 - 1/4)
    CHECK(p.re == Rational(-7, 24));
    CHECK(p.im == Rational(-1, 6));

    ExactScalar q = a / b;
    CHECK(q * b == a);

    CHECK(ExactScalar::i() * ExactScalar::i() == ExactScalar(-1));
    CHECK(a * a.conj() == ExactScalar(Rational(1, 4) + Rational(9, 16)));
    CHECK(ExactScalar::i_pow(5) == ExactScalar::i());
    CHECK(ExactScalar::i_pow(-1) == ExactScalar(Rational(0), Rational(-1)));
    CHECK(ExactScalar::i_pow(2) == ExactScalar(-1));
}

TEST_CASE("scalar parse and format round trip") {
    ExactScalar v(Rational(-3, 7), Rational(2, 5));
    CHECK(parse_exact(format_exact(v)) == v);
    CHECK(format_exact(ExactScalar(Rational(1, 2))) == "1/2");
    CHECK(parse_exact("0") == ExactScalar());
    CHECK(parse_exact("i") == ExactScalar::i());
    CHECK(parse_exact("-i") == ExactScalar(Rational(0), Rational(-1)));
    CHECK(parse_exact("2-3i") == ExactScalar(Rational(2), Rational(-3)));
    CHECK(parse_exact("1/2+1/3i") ==
          ExactScalar(Rational(1, 2), Rational(1, 3)));
}

TEST_CASE("pi-graded constants") {
    ExactConstant two_pi(Rational(2), 2);
    CHECK(format_exact(two_pi) == "2*pi");
    ExactConstant root_pi(Rational(1), 1);
    CHECK(format_exact(root_pi) == "pi^(1/2)");
    ExactConstant c(Rational(-3, 4), 1);
    CHECK(format_exact(c) == "-3/4*pi^(1/2)");
    CHECK(parse_exact_constant(format_exact(c)) == c);
    CHECK(parse_exact_constant("2*pi^(2/2)") == two_pi);
    CHECK(parse_exact_constant("5") == ExactConstant(Rational(5), 0));

    ExactConstant prod = two_pi * root_pi;
    CHECK(prod.coeff == Rational(2));
    CHECK(prod.pi_half == 3);

    ExactConstant sum = two_pi + ExactConstant(Rational(1), 2);
    CHECK(sum.coeff == Rational(3));
    CHECK_THROWS_AS(two_pi + root_pi, ExactDomainError);
    // zero absorbs any grade
    ExactConstant zero(Rational(0), 5);
    CHECK((zero + root_pi) == root_pi);
}

TEST_CASE("half integer gamma values") {
    // Gamma(1/2) = sqrt(pi), Gamma(5/2) = 3/4 sqrt(pi)
    CHECK(gamma_half_integer(0) == ExactConstant(Rational(1), 1));
    CHECK(gamma_half_integer(2) == ExactConstant(Rational(3, 4), 1));
    CHECK(gamma_half_integer(1) == ExactConstant(Rational(1, 2), 1));
    CHECK(gamma_integer(5) == ExactConstant(Rational(24), 0));
    CHECK(gamma_integer(1) == ExactConstant(Rational(1), 0));
}

TEST_CASE("extended precision reals") {
    CHECK(Real::working_precision() >= 166);  // >= 50 digits
    Real pi = real_pi();
    CHECK(close(pi, 3.14159265358979, 1e-13));
    CHECK(close(sqrt(Real(2)) * sqrt(Real(2)), 2.0, 1e-30));
    CHECK(close(exp(log(Real(10))), 10.0, 1e-30));
    CHECK(close(gamma(Real(0.5)) * gamma(Real(0.5)), 3.14159265358979, 1e-12));
    Real g = real_euler();
    CHECK(close(g, 0.57721566490153286, 1e-15));
    CHECK(close(digamma(Real(1)), -0.57721566490153286, 1e-15));
}

TEST_CASE("hurwitz zeta oracles") {
    Real pi = real_pi();
    // zeta(2) = pi^2/6
    CHECK(close(hurwitz_zeta(Real(2), Real(1)), approx(pi * pi / Real(6)), 1e-40));
    // zeta(-1) = -1/12
    CHECK(close(hurwitz_zeta(Real(-1), Real(1)), -1.0 / 12.0, 1e-40));
    // zeta(2, 1/2) = pi^2/2
    CHECK(close(hurwitz_zeta(Real(2), Real(0.5)), approx(pi * pi / Real(2)), 1e-40));
    // zeta(0, a) = 1/2 - a
    CHECK(close(hurwitz_zeta(Real(0), Real(0.25)), 0.25, 1e-40));
    // zeta(3) against a known constant
    CHECK(close(hurwitz_zeta(Real(3), Real(1)), 1.2020569031595942854, 1e-18));
}

TEST_CASE("polygamma oracles") {
    Real pi = real_pi();
    CHECK(close(polygamma(0, Real(1)), -0.57721566490153286, 1e-18));
    CHECK(close(polygamma(1, Real(1)), approx(pi * pi / Real(6)), 1e-40));
    // psi(1/2) = -gamma - 2 ln 2
    Real expect = -real_euler() - Real(2) * log(Real(2));
    CHECK(close(polygamma(0, Real(0.5)), approx(expect), 1e-40));
    // psi'(1/2) = pi^2/2
    CHECK(close(polygamma(1, Real(0.5)), approx(pi * pi / Real(2)), 1e-40));
}

TEST_CASE("gamma derivative oracles") {
    // Gamma'(1) = -gamma, Gamma''(1) = gamma^2 + pi^2/6
    auto d = gamma_derivatives(Real(1), 2);
    Real g = real_euler();
    Real pi = real_pi();
    CHECK(close(d[0], 1.0, 1e-40));
    CHECK(close(d[1], approx(-g), 1e-38));
    CHECK(close(d[2], approx(g * g + pi * pi / Real(6)), 1e-38));
}

TEST_CASE("reciprocal gamma derivative oracles") {
    // f = 1/Gamma. f(1) = 1, f'(1) = gamma.
    auto d1 = reciprocal_gamma_derivatives(Rational(1), 1);
    CHECK(close(d1[0], 1.0, 1e-40));
    CHECK(close(d1[1], 0.57721566490153286, 1e-18));

    // At 0: f(0) = 0, f'(0) = 1, f''(0) = 2 gamma.
    auto d0 = reciprocal_gamma_derivatives(Rational(0), 2);
    CHECK(close(d0[0], 0.0, 1e-40));
    CHECK(close(d0[1], 1.0, 1e-38));
    CHECK(close(d0[2], 2 * 0.57721566490153286, 1e-18));

    // f(1/2) = 1/sqrt(pi)
    auto dh = reciprocal_gamma_derivatives(Rational(1, 2), 0);
    CHECK(close(dh[0], approx(Real(1) / sqrt(real_pi())), 1e-40));

    // finite-difference cross-check of f'(3/2) using 1/Gamma directly
    auto dq = reciprocal_gamma_derivatives(Rational(3, 2), 1);
    Real h(Rational(1, 1000000));
    Real x(Rational(3, 2));
    Real fp = Real(1) / gamma(x + h);
    Real fm = Real(1) / gamma(x - h);
    Real fd = (fp - fm) / (Real(2) * h);
    CHECK(close(dq[1], approx(fd), 1e-11));
}

TEST_CASE("taylor exponential") {
    // exp of t + t^2/2 up to order 4
    Taylor a(5);
    a.c = {Real(0), Real(1), Real(0.5), Real(0), Real(0)};
    Taylor e = taylor_exp(a);
    CHECK(close(e.c[0], 1.0, 1e-40));
    CHECK(close(e.c[1], 1.0, 1e-40));
    CHECK(close(e.c[2], 1.0, 1e-40));       // 1/2 + 1/2
    CHECK(close(e.c[3], 2.0 / 3.0, 1e-40)); // 1/6 + 1/2
    CHECK(close(e.c[4], 5.0 / 12.0, 1e-35));

    // lngamma_taylor consistency: exp(lngamma(2+h)) coefficient check
    Taylor lg = lngamma_taylor(Real(2), 3);
    CHECK(close(lg.c[0], 0.0, 1e-38));                       // ln 1! = 0
    CHECK(close(lg.c[1], 1 - 0.57721566490153286, 1e-15));   // psi(2)
}
