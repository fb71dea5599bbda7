#include "torcal/exact.hpp"

#include <cctype>

namespace torcal {

Rational rational_from_string(const std::string& s0) {
    std::string s = s0;
    if (!s.empty() && s.front() == '+') s.erase(0, 1);  // gmp rejects a leading +
    if (s.empty()) throw ExactDomainError("empty rational literal");
    mpq_t q;
    mpq_init(q);
    if (mpq_set_str(q, s.c_str(), 10) != 0) {
        mpq_clear(q);
        throw ExactDomainError("bad rational literal: " + s);
    }
    if (mpz_sgn(mpq_denref(q)) == 0) {
        mpq_clear(q);
        throw ExactDomainError("zero denominator: " + s);
    }
    mpq_canonicalize(q);
    Rational out(q);
    mpq_clear(q);
    return out;
}

std::string rational_to_string(const Rational& q) {
    return q.get_str();  // canonical "p" or "p/q"
}

ExactScalar ExactScalar::i_pow(long k) {
    long m = ((k % 4) + 4) % 4;
    switch (m) {
        case 0: return ExactScalar(1);
        case 1: return ExactScalar::i();
        case 2: return ExactScalar(-1);
        default: return -ExactScalar::i();
    }
}

ExactScalar& ExactScalar::operator+=(const ExactScalar& o) {
    re += o.re;
    im += o.im;
    return *this;
}

ExactScalar& ExactScalar::operator-=(const ExactScalar& o) {
    re -= o.re;
    im -= o.im;
    return *this;
}

ExactScalar& ExactScalar::operator*=(const ExactScalar& o) {
    Rational r = re * o.re - im * o.im;
    Rational i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

ExactScalar& ExactScalar::operator/=(const ExactScalar& o) {
    Rational n = o.re * o.re + o.im * o.im;
    if (n == 0) throw ExactDomainError("division by zero ExactScalar");
    Rational r = (re * o.re + im * o.im) / n;
    Rational i = (im * o.re - re * o.im) / n;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

namespace {

// formats q*i with sign, q nonzero
std::string imag_part_str(const Rational& q) {
    if (q == 1) return "i";
    if (q == -1) return "-i";
    return rational_to_string(q) + "*i";
}

}  // namespace

std::string format_exact(const ExactScalar& v) {
    if (v.im == 0) return rational_to_string(v.re);
    if (v.re == 0) return imag_part_str(v.im);
    std::string s = rational_to_string(v.re);
    if (v.im > 0) s += "+";
    s += imag_part_str(v.im);
    return s;
}

ExactScalar parse_exact(const std::string& s) {
    if (s.empty()) throw ExactDomainError("empty scalar literal");
    // split into real and imaginary summands at a top-level +/- (not the leading sign)
    size_t split = std::string::npos;
    for (size_t p = 1; p < s.size(); ++p) {
        if ((s[p] == '+' || s[p] == '-') && s[p - 1] != '/' && s[p - 1] != '+' && s[p - 1] != '-')
            split = p;  // last one wins; forms are re(+/-)im*i
    }
    auto parse_part = [](const std::string& t) -> std::pair<bool, Rational> {
        // returns {is_imag, value}
        if (t == "i") return {true, Rational(1)};
        if (t == "-i") return {true, Rational(-1)};
        if (t == "+i") return {true, Rational(1)};
        if (t.size() > 2 && t.substr(t.size() - 2) == "*i")
            return {true, rational_from_string(t.substr(0, t.size() - 2))};
        if (t.size() > 1 && t.back() == 'i')  // "3i" shorthand
            return {true, rational_from_string(t.substr(0, t.size() - 1))};
        return {false, rational_from_string(t)};
    };
    if (split == std::string::npos) {
        auto [isim, val] = parse_part(s);
        return isim ? ExactScalar(Rational(0), val) : ExactScalar(val);
    }
    auto [isim1, v1] = parse_part(s.substr(0, split));
    std::string rest = s.substr(split);  // keeps sign
    auto [isim2, v2] = parse_part(rest);
    if (isim1 == isim2) throw ExactDomainError("malformed scalar literal: " + s);
    ExactScalar out;
    if (isim1) {
        out.im = v1;
        out.re = v2;
    } else {
        out.re = v1;
        out.im = v2;
    }
    return out;
}

std::string format_exact(const ExactConstant& v) {
    if (v.pi_half == 0 || v.coeff == 0) return rational_to_string(v.coeff);
    std::string head;
    if (v.coeff == -1)
        head = "-";
    else if (v.coeff != 1)
        head = rational_to_string(v.coeff) + "*";
    if (v.pi_half == 2) return head + "pi";
    if (v.pi_half % 2 == 0) return head + "pi^" + std::to_string(v.pi_half / 2);
    return head + "pi^(" + std::to_string(v.pi_half) + "/2)";
}

ExactConstant parse_exact_constant(const std::string& s) {
    auto pi_at = s.find("pi");
    if (pi_at == std::string::npos) return ExactConstant(rational_from_string(s), 0);
    Rational c(1);
    if (pi_at == 1 && s[0] == '-')
        c = -1;
    else if (pi_at > 0) {
        if (s[pi_at - 1] != '*') throw ExactDomainError("malformed constant literal: " + s);
        c = rational_from_string(s.substr(0, pi_at - 1));
    }
    std::string tail = s.substr(pi_at + 2);
    if (tail.empty()) return ExactConstant(c, 2);
    if (tail[0] != '^') throw ExactDomainError("malformed constant literal: " + s);
    tail = tail.substr(1);
    if (!tail.empty() && tail.front() == '(') {
        if (tail.back() != ')') throw ExactDomainError("malformed constant literal: " + s);
        tail = tail.substr(1, tail.size() - 2);
        auto slash = tail.find('/');
        if (slash == std::string::npos || tail.substr(slash + 1) != "2")
            throw ExactDomainError("malformed constant exponent: " + s);
        return ExactConstant(c, std::stoi(tail.substr(0, slash)));
    }
    return ExactConstant(c, 2 * std::stoi(tail));
}

ExactConstant gamma_half_integer(long n) {
    if (n < 0) throw ExactDomainError("gamma_half_integer: need n >= 0");
    // Gamma(1/2) = sqrt(pi); Gamma(x+1) = x Gamma(x)
    Rational c(1);
    for (long j = 0; j < n; ++j) c *= Rational(2 * j + 1, 2);
    return ExactConstant(c, 1);
}

ExactConstant gamma_integer(long n) {
    if (n <= 0) throw ExactDomainError("gamma_integer: pole at nonpositive integer");
    Rational c(1);
    for (long j = 2; j < n; ++j) c *= j;
    return ExactConstant(c, 0);
}

}  // namespace torcal
