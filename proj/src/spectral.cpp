#include "torcal/spectral.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <string>

#include "torcal/series.hpp"

namespace torcal {

namespace {

Real factorial_real(long n) {
    Real r(1);
    for (long i = 2; i <= n; ++i) r = r * Real(i);
    return r;
}

Real binom_real(int n, int k) {
    if (k < 0 || k > n) return Real(0);
    Real r(1);
    for (int i = 0; i < k; ++i) r = r * Real(long(n - i)) / Real(long(i + 1));
    return r;
}

// Surface measure of the unit sphere in R^d.
Real sphere_area(int d) {
    Real pi = real_pi();
    return Real(2) * pow(pi, Real(Rational(d, 2))) / gamma(Real(Rational(d, 2)));
}

void enumerate_ball(int dim, long radius, const std::function<void(const ZVec&)>& fn) {
    ZVec k(dim, 0);
    const Integer r2 = Integer(radius) * Integer(radius);
    std::function<void(int, Integer)> rec = [&](int axis, Integer acc) {
        if (axis == dim) {
            fn(k);
            return;
        }
        for (long v = -radius; v <= radius; ++v) {
            Integer a2 = acc + Integer(v) * Integer(v);
            if (a2 > r2) continue;
            k[axis] = v;
            rec(axis + 1, a2);
        }
        k[axis] = 0;
    };
    rec(0, Integer(0));
}

enum class MatrixShape { diagonal, corner };

MatrixShape eigen_shape(const MatrixSymbol& p) {
    bool diag = true;
    for (int r = 0; r < p.size; ++r)
        for (int c = 0; c < p.size; ++c)
            if (r != c && !p.at(r, c).is_exactly_zero()) diag = false;
    if (diag) return MatrixShape::diagonal;
    if (p.size == 2 && p.at(0, 0).is_exactly_zero() && p.at(1, 1).is_exactly_zero() &&
        !p.at(0, 1).is_exactly_zero() && !p.at(1, 0).is_exactly_zero())
        return MatrixShape::corner;
    throw ExactDomainError("matrix shape outside the eigenvalue table");
}

void require_x_independent(const MatrixSymbol& p) {
    for (int r = 0; r < p.size; ++r)
        for (int c = 0; c < p.size; ++c)
            for (const auto& [deg, atoms] : p.at(r, c).terms)
                for (const auto& at : atoms)
                    if (!zvec_is_zero(at.xmode))
                        throw ExactDomainError("eigenvalue data needs an x-independent symbol");
}

ExactScalar mode_value(const PolyhomogeneousSymbol& s, const ZVec& k) {
    return symbol_apply_to_mode(s, k).coefficient(k);
}

// Common tail majorant: sheets * weight * count-constant * integral of
// r^{d-1} f(r) over r >= radius-1, where f majorizes the summand through
// lambda >= floor * r^degree.  The 2*4^d constant covers lattice-vs-integral
// slack in the shell counts for the low dimensions in scope.
Real tail_constant(const EigenLattice& e) {
    return Real(2) * pow(Real(4), long(e.tail_dim)) * Real(e.tail_sheets) * e.char_bound;
}

Real power_weight_cap(const EigenLattice& e) {
    if (e.weight_power == 0) return Real(1);
    Real lam_min = e.growth_floor * pow(Real(e.radius), e.growth_degree);
    return pow(lam_min, Real(e.weight_power));
}

void canonical_term_order(std::vector<ExpansionTerm>& terms) {
    std::stable_sort(terms.begin(), terms.end(), [](const ExpansionTerm& a, const ExpansionTerm& b) {
        if (a.s != b.s) return a.s > b.s;
        return a.logpow < b.logpow;
    });
}

const char* kind_name(AsymptoticExpansion::Kind k) {
    switch (k) {
        case AsymptoticExpansion::Kind::heat: return "heat";
        case AsymptoticExpansion::Kind::zeta: return "zeta";
        default: return "resolvent";
    }
}

} // namespace

EigenLattice eigendata(const MatrixSymbol& p, long radius, const WeightSpec& w,
                       bool drop_kernel) {
    if (radius < 2) throw ExactDomainError("enumeration radius must be at least 2");
    require_x_independent(p);
    const MatrixShape shape = eigen_shape(p);

    if (w.power && *w.power > 0)
        throw ExactDomainError("weight power must be nonpositive");
    if (w.character) {
        if (w.character->axis < 0 || w.character->axis >= p.dim)
            throw ExactDomainError("band table axis out of range");
        if (w.character->coef.empty())
            throw ExactDomainError("empty band table");
    }

    EigenLattice e;
    e.dim = p.dim;
    e.radius = radius;
    e.weight_power = w.power ? *w.power : Rational(0);

    long sheets = 1;
    e.tail_dim = p.dim;
    e.char_bound = Real(1);
    if (w.character) {
        e.tail_dim = p.dim - 1;
        sheets = 0;
        Rational cb(0);
        for (const auto& [m, c] : w.character->coef) {
            if (c == 0) continue;
            ++sheets;
            if (abs(c) > cb) cb = abs(c);
        }
        if (sheets == 0) throw ExactDomainError("empty band table");
        e.char_bound = Real(cb);
    }

    long g = 0;
    if (shape == MatrixShape::corner) {
        g = p.at(0, 1).order;
    } else {
        for (int r = 0; r < p.size; ++r)
            if (!p.at(r, r).is_exactly_zero()) g = std::max(g, p.at(r, r).order);
    }
    if (g <= 0) throw ExactDomainError("symbol order must be positive for eigenvalue growth");
    e.growth_degree = g;
    e.tail_sheets = sheets * ((shape == MatrixShape::corner) ? 2 : p.size);

    enumerate_ball(p.dim, radius, [&](const ZVec& k) {
        Rational char_w(1);
        if (w.character) {
            auto it = w.character->coef.find(k[size_t(w.character->axis)]);
            if (it == w.character->coef.end() || it->second == 0) return;
            char_w = it->second;
        }
        auto push = [&](int comp, const Real& lam) {
            if (lam.sign() < 0)
                throw ExactDomainError("negative eigenvalue inside the enumeration window");
            if (lam.is_zero()) {
                if (drop_kernel) return;
                throw ExactDomainError("zero eigenvalue inside the enumeration window");
            }
            EigenEntry en;
            en.mode = k;
            en.comp = comp;
            en.lambda = lam;
            en.weight = Real(char_w);
            if (w.power) en.weight = en.weight * pow(lam, Real(*w.power));
            e.entries.push_back(std::move(en));
        };
        if (shape == MatrixShape::corner) {
            ExactScalar c01 = mode_value(p.at(0, 1), k);
            ExactScalar c10 = mode_value(p.at(1, 0), k);
            Rational n01 = c01.re * c01.re + c01.im * c01.im;
            Rational n10 = c10.re * c10.re + c10.im * c10.im;
            if (n01 != n10)
                throw ExactDomainError("corner magnitudes disagree; not a square root case");
            Real lam = sqrt(Real(n01));
            push(0, lam);
            push(1, lam);
        } else {
            for (int r = 0; r < p.size; ++r) {
                ExactScalar v = mode_value(p.at(r, r), k);
                if (!v.is_real())
                    throw ExactDomainError("diagonal symbol values must be real on modes");
                push(r, Real(v.re));
            }
        }
    });

    if (e.entries.empty())
        throw NumericError("no weighted modes inside the enumeration ball");

    if (e.tail_dim > 0) {
        const Integer shell2 = Integer(radius / 2) * Integer(radius / 2);
        bool seen = false;
        Real floor_val(0);
        for (const auto& en : e.entries) {
            Integer n2 = zvec_norm2(en.mode);
            if (n2 <= shell2) continue;
            Real ratio = en.lambda / pow(sqrt(Real(Rational(n2))), g);
            if (!seen || ratio < floor_val) floor_val = ratio;
            seen = true;
        }
        if (!seen)
            throw NumericError("enumeration ball too small to estimate growth");
        e.growth_floor = floor_val;
    } else {
        e.growth_floor = Real(0);
    }
    return e;
}

TraceValue heat_trace(const EigenLattice& e, const Real& t) {
    if (!(t > Real(0))) throw NumericError("heat parameter must be positive");
    Real value(0);
    for (const auto& en : e.entries) value = value + en.weight * exp(-(t * en.lambda));
    TraceValue out;
    out.value = value;
    if (e.tail_dim == 0) {
        out.tail_bound = Real(0);
        return out;
    }
    const long g = e.growth_degree;
    const int d = e.tail_dim;
    const Real a = e.growth_floor;
    const Real edge = Real(e.radius - 1);
    Real ta = t * a;
    Real integral = pow(ta, -Real(Rational(d, g))) / Real(g) *
                    gamma_upper(Real(Rational(d, g)), ta * pow(edge, g));
    out.tail_bound = tail_constant(e) * power_weight_cap(e) * sphere_area(d) * integral;
    return out;
}

TraceValue zeta_trace(const EigenLattice& e, const Real& z) {
    TraceValue out;
    Real value(0);
    for (const auto& en : e.entries) value = value + en.weight * pow(en.lambda, -z);
    out.value = value;
    if (e.tail_dim == 0) {
        out.tail_bound = Real(0);
        return out;
    }
    const long g = e.growth_degree;
    const int d = e.tail_dim;
    Real ze = z - Real(e.weight_power);
    Real margin = Real(g) * ze - Real(long(d));
    if (!(margin > Real(0)))
        throw NumericError("argument left of the convergence abscissa; use the expansion route");
    const Real a = e.growth_floor;
    const Real edge = Real(e.radius - 1);
    Real integral = pow(a, -ze) * pow(edge, -margin) / margin;
    out.tail_bound = tail_constant(e) * sphere_area(d) * integral;
    return out;
}

TraceValue resolvent_trace(const EigenLattice& e, int power, const Real& lambda) {
    if (power < 1) throw ExactDomainError("resolvent power must be positive");
    if (!(lambda < Real(0)))
        throw NumericError("resolvent point must lie on the negative real axis");
    TraceValue out;
    Real value(0);
    for (const auto& en : e.entries)
        value = value + en.weight / pow(en.lambda - lambda, long(power));
    out.value = value;
    if (e.tail_dim == 0) {
        out.tail_bound = Real(0);
        return out;
    }
    const long g = e.growth_degree;
    const int d = e.tail_dim;
    Real margin = Real(g) * Real(long(power)) - Real(long(d));
    if (!(margin > Real(0)))
        throw NumericError("resolvent power left of the convergence abscissa");
    const Real a = e.growth_floor;
    const Real edge = Real(e.radius - 1);
    Real integral = pow(a, -Real(long(power))) * pow(edge, -margin) / margin;
    out.tail_bound =
        tail_constant(e) * power_weight_cap(e) * sphere_area(d) * integral;
    return out;
}

namespace {

Real basis_eval(const Real& x, const Rational& s, int q) {
    Real v = pow(x, -Real(s));
    if (q > 0) v = v * pow(log(x), long(q));
    return v;
}

struct LsqResult {
    std::vector<Real> coef;
    Real condition;
    Real residual;
};

// Least squares by modified Gram-Schmidt with one reorthogonalization pass.
LsqResult solve_lsq(const std::vector<std::pair<Real, Real>>& samples,
                    const std::vector<std::pair<Rational, int>>& tmpl) {
    const size_t m = samples.size();
    const size_t n = tmpl.size();
    std::vector<std::vector<Real>> a(n, std::vector<Real>(m, Real(0)));
    for (size_t j = 0; j < n; ++j)
        for (size_t i = 0; i < m; ++i)
            a[j][i] = basis_eval(samples[i].first, tmpl[j].first, tmpl[j].second);

    auto dot = [m](const std::vector<Real>& u, const std::vector<Real>& v) {
        Real s(0);
        for (size_t i = 0; i < m; ++i) s = s + u[i] * v[i];
        return s;
    };

    std::vector<std::vector<Real>> q(n);
    std::vector<std::vector<Real>> r(n, std::vector<Real>(n, Real(0)));
    for (size_t j = 0; j < n; ++j) {
        std::vector<Real> v = a[j];
        for (int pass = 0; pass < 2; ++pass)
            for (size_t i = 0; i < j; ++i) {
                Real p = dot(q[i], v);
                r[i][j] = r[i][j] + p;
                for (size_t t = 0; t < m; ++t) v[t] = v[t] - p * q[i][t];
            }
        Real nrm = sqrt(dot(v, v));
        if (nrm.is_zero()) throw NumericError("degenerate fit template");
        r[j][j] = nrm;
        for (size_t t = 0; t < m; ++t) v[t] = v[t] / nrm;
        q[j] = std::move(v);
    }

    Real dmax = abs(r[0][0]), dmin = abs(r[0][0]);
    for (size_t j = 1; j < n; ++j) {
        Real dj = abs(r[j][j]);
        if (dj > dmax) dmax = dj;
        if (dj < dmin) dmin = dj;
    }
    LsqResult out;
    out.condition = dmax / dmin;
    if (out.condition > Real("1e40"))
        throw NumericError("fit template is numerically degenerate on these samples");

    std::vector<Real> y(m);
    for (size_t i = 0; i < m; ++i) y[i] = samples[i].second;
    std::vector<Real> qty(n);
    for (size_t j = 0; j < n; ++j) qty[j] = dot(q[j], y);

    out.coef.assign(n, Real(0));
    for (size_t j = n; j-- > 0;) {
        Real s = qty[j];
        for (size_t t = j + 1; t < n; ++t) s = s - r[j][t] * out.coef[t];
        out.coef[j] = s / r[j][j];
    }

    Real rss(0);
    for (size_t i = 0; i < m; ++i) {
        Real pred(0);
        for (size_t j = 0; j < n; ++j) pred = pred + a[j][i] * out.coef[j];
        Real diff = pred - y[i];
        rss = rss + diff * diff;
    }
    out.residual = sqrt(rss);
    return out;
}

} // namespace

FitReport fit_expansion(const std::vector<std::pair<Real, Real>>& samples,
                        const std::vector<std::pair<Rational, int>>& tmpl,
                        AsymptoticExpansion::Kind kind) {
    if (kind == AsymptoticExpansion::Kind::zeta)
        throw ExactDomainError("zeta expansions are reached through the heat transform");
    if (tmpl.empty()) throw NumericError("empty fit template");
    if (samples.size() <= tmpl.size())
        throw NumericError("need more samples than template terms");
    for (const auto& [x, y] : samples)
        if (!(x > Real(0))) throw NumericError("sample points must be positive");

    LsqResult full = solve_lsq(samples, tmpl);

    FitReport rep;
    rep.condition = full.condition;
    rep.residual = full.residual;
    rep.drift = Real(0);
    if (tmpl.size() >= 2) {
        std::vector<std::pair<Rational, int>> trimmed(tmpl.begin(), tmpl.end() - 1);
        LsqResult part = solve_lsq(samples, trimmed);
        for (size_t j = 0; j < trimmed.size(); ++j) {
            Real rel = abs(full.coef[j] - part.coef[j]) / (Real(1) + abs(full.coef[j]));
            if (rel > rep.drift) rep.drift = rel;
        }
    }

    rep.expansion.kind = kind;
    for (size_t j = 0; j < tmpl.size(); ++j) {
        ExpansionTerm t;
        t.s = tmpl[j].first;
        t.logpow = tmpl[j].second;
        t.coeff = full.coef[j];
        rep.expansion.terms.push_back(std::move(t));
    }
    canonical_term_order(rep.expansion.terms);
    return rep;
}

namespace {

AsymptoticExpansion heat_to_zeta(const AsymptoticExpansion& e) {
    AsymptoticExpansion out;
    out.kind = AsymptoticExpansion::Kind::zeta;
    for (const auto& t : e.terms) {
        ExpansionTerm o = t;
        o.coeff = t.coeff * factorial_real(t.logpow);
        if (t.logpow % 2) o.coeff = -o.coeff;
        out.terms.push_back(std::move(o));
    }
    canonical_term_order(out.terms);
    return out;
}

AsymptoticExpansion zeta_to_heat(const AsymptoticExpansion& e) {
    AsymptoticExpansion out;
    out.kind = AsymptoticExpansion::Kind::heat;
    for (const auto& t : e.terms) {
        ExpansionTerm o = t;
        o.coeff = t.coeff / factorial_real(t.logpow);
        if (t.logpow % 2) o.coeff = -o.coeff;
        out.terms.push_back(std::move(o));
    }
    canonical_term_order(out.terms);
    return out;
}

// Laplace transform of t^{-s} log^q t against the order-K resolvent kernel:
// each heat exponent s turns into the resolvent exponent K - s, with the log
// block mixed by derivatives of Gamma at K - s.
AsymptoticExpansion heat_to_resolvent(const AsymptoticExpansion& e, int k) {
    if (k < 1) throw ExactDomainError("resolvent power must be positive");
    std::map<Rational, std::vector<Real>> blocks;
    for (const auto& t : e.terms) {
        if (Rational(k) <= t.s)
            throw ExactDomainError("resolvent power must exceed the top heat exponent");
        auto& v = blocks[t.s];
        if (int(v.size()) <= t.logpow) v.resize(size_t(t.logpow) + 1, Real(0));
        v[size_t(t.logpow)] = v[size_t(t.logpow)] + t.coeff;
    }
    AsymptoticExpansion out;
    out.kind = AsymptoticExpansion::Kind::resolvent;
    out.resolvent_power = k;
    Real kf = factorial_real(k - 1);
    for (const auto& [s, cs] : blocks) {
        int qmax = int(cs.size()) - 1;
        Rational a = Rational(k) - s;
        std::vector<Real> dg = gamma_derivatives(Real(a), qmax);
        for (int i = 0; i <= qmax; ++i) {
            Real acc(0);
            for (int q = i; q <= qmax; ++q)
                acc = acc + binom_real(q, i) * dg[size_t(q - i)] * cs[size_t(q)];
            if (i % 2) acc = -acc;
            acc = acc / kf;
            if (acc.is_zero()) continue;
            ExpansionTerm o;
            o.s = a;
            o.logpow = i;
            o.coeff = acc;
            out.terms.push_back(std::move(o));
        }
    }
    canonical_term_order(out.terms);
    return out;
}

AsymptoticExpansion resolvent_to_heat(const AsymptoticExpansion& e) {
    const int k = e.resolvent_power;
    if (k < 1) throw ExactDomainError("resolvent power must be positive");
    std::map<Rational, std::vector<Real>> blocks;
    for (const auto& t : e.terms) {
        auto& v = blocks[t.s];
        if (int(v.size()) <= t.logpow) v.resize(size_t(t.logpow) + 1, Real(0));
        v[size_t(t.logpow)] = v[size_t(t.logpow)] + t.coeff;
    }
    AsymptoticExpansion out;
    out.kind = AsymptoticExpansion::Kind::heat;
    Real kf = factorial_real(k - 1);
    for (const auto& [a, rs] : blocks) {
        if (!(a > 0))
            throw ExactDomainError("resolvent exponents must be positive to invert");
        int qmax = int(rs.size()) - 1;
        std::vector<Real> dg = gamma_derivatives(Real(a), qmax);
        // triangular system: r_i = sum_{q >= i} (-1)^i C(q,i) dg[q-i] c_q / (k-1)!
        std::vector<Real> c(size_t(qmax) + 1, Real(0));
        for (int q = qmax; q >= 0; --q) {
            Real rhs = rs[size_t(q)] * kf;
            if (q % 2) rhs = -rhs;
            for (int t = q + 1; t <= qmax; ++t) {
                Real m = binom_real(t, q) * dg[size_t(t - q)];
                rhs = rhs - m * c[size_t(t)];
            }
            c[size_t(q)] = rhs / dg[0];
        }
        for (int q = 0; q <= qmax; ++q) {
            if (c[size_t(q)].is_zero()) continue;
            ExpansionTerm o;
            o.s = Rational(k) - a;
            o.logpow = q;
            o.coeff = c[size_t(q)];
            out.terms.push_back(std::move(o));
        }
    }
    canonical_term_order(out.terms);
    return out;
}

} // namespace

AsymptoticExpansion expansion_transform(const AsymptoticExpansion& e,
                                        AsymptoticExpansion::Kind to,
                                        int resolvent_power) {
    using Kind = AsymptoticExpansion::Kind;
    if (to == e.kind) {
        if (to != Kind::resolvent || resolvent_power == 0 ||
            resolvent_power == e.resolvent_power)
            return e;
    }
    AsymptoticExpansion heat;
    switch (e.kind) {
        case Kind::heat: heat = e; break;
        case Kind::zeta: heat = zeta_to_heat(e); break;
        case Kind::resolvent: heat = resolvent_to_heat(e); break;
    }
    switch (to) {
        case Kind::heat: canonical_term_order(heat.terms); return heat;
        case Kind::zeta: return heat_to_zeta(heat);
        case Kind::resolvent: return heat_to_resolvent(heat, resolvent_power);
    }
    throw ExactDomainError("unknown expansion kind");
}

ExactConstant sphere_monomial_integral(const ZVec& alpha, int n) {
    if (int(alpha.size()) != n)
        throw ExactDomainError("exponent length does not match the dimension");
    for (long a : alpha)
        if (a % 2 != 0) return ExactConstant();
    if (n == 1) return ExactConstant(Rational(2), 0);
    ExactConstant num(Rational(2), 0);
    long total = 0;
    for (long a : alpha) {
        if (a < 0)
            throw ExactDomainError("negative exponents are outside the exact sphere table");
        num = num * gamma_half_integer(a / 2);
        total += a;
    }
    long s = total + n;
    ExactConstant den = (s % 2 == 0) ? gamma_integer(s / 2) : gamma_half_integer((s - 1) / 2);
    return num / den;
}

ExactConstant wodzicki_residue(const MatrixSymbol& a) {
    const int n = a.dim;
    ExactConstant acc;
    for (int r = 0; r < a.size; ++r) {
        const PolyhomogeneousSymbol& e = a.at(r, r);
        if (e.is_exactly_zero()) continue;
        if (e.tail && *e.tail >= -n)
            throw ExactDomainError("window does not retain the residue degree");
        auto it = e.terms.find(-long(n));
        if (it == e.terms.end()) continue;
        for (const Atom& at : it->second) {
            if (at.marker)
                throw ExactDomainError("marked symbols need the spectral route for residues");
            if (!zvec_is_zero(at.xmode)) continue;
            auto absorb = [&](const LaurentPoly& part) {
                for (const auto& [beta, c] : part) {
                    if (c.is_zero()) continue;
                    if (!c.is_real())
                        throw ExactDomainError("complex residue density outside the exact table");
                    acc = acc + ExactConstant(c.re, 0) * sphere_monomial_integral(beta, n);
                }
            };
            absorb(at.xi.L);
            absorb(at.xi.M);
        }
    }
    return acc;
}

TauTable tau_functionals(const AsymptoticExpansion& e, int max_order, const Real& pole_tol) {
    if (e.kind != AsymptoticExpansion::Kind::zeta)
        throw ExactDomainError("trace ladder needs zeta-kind data");
    if (max_order < 0) throw ExactDomainError("ladder depth must be nonnegative");
    std::map<int, Real> b;
    int qtop = 0;
    for (const auto& t : e.terms) {
        if (t.s != 0) continue;
        auto [it, fresh] = b.emplace(t.logpow, t.coeff);
        if (!fresh) it->second = it->second + t.coeff;
        qtop = std::max(qtop, t.logpow);
    }
    // Taylor data of 1/Gamma at 0: the ladder divides out the Gamma factor.
    std::vector<Real> rg = reciprocal_gamma_derivatives(Rational(0), qtop + max_order + 2);
    std::vector<Real> gcoef(rg.size());
    for (size_t m = 0; m < rg.size(); ++m) gcoef[m] = rg[m] / factorial_real(long(m));

    auto bval = [&](int q) { return b.count(q) ? b.at(q) : Real(0); };
    auto tau_at = [&](int j) {
        Real s(0);
        for (int m = 1; j + m <= qtop; ++m) s = s + bval(j + m) * gcoef[size_t(m)];
        return s;
    };

    TauTable out;
    bool pole = false;
    for (int j = 0; j <= qtop; ++j)
        if (abs(tau_at(j)) > pole_tol) pole = true;
    out.zero_is_pole = pole;
    for (int j = 0; j <= max_order; ++j) out.tau[j] = tau_at(j);
    if (!pole) {
        Real s(0);
        for (int q = 0; q <= qtop; ++q) s = s + bval(q) * gcoef[size_t(q + 1)];
        out.tau[-1] = s;
    }
    return out;
}

WeylCount weyl_count(const EigenLattice& e, const Real& t, const GroupDescriptor& g) {
    if (e.weight_power != 0)
        throw ExactDomainError("counting needs unweighted or band-table weights");
    long m = e.dim;
    if (const auto* circ = std::get_if<CircleDesc>(&g)) m = e.dim - long(circ->axes.size());
    if (m <= 0) throw ExactDomainError("orbit space has no growth axis to count along");
    if (e.tail_dim > 0) {
        Real cover = e.growth_floor * pow(Real(e.radius), e.growth_degree);
        if (!(cover > t))
            throw NumericError("enumeration cutoff below the counting threshold");
    }
    Real count(0);
    for (const auto& en : e.entries)
        if (!(en.lambda > t)) count = count + en.weight;
    if (count.is_zero()) throw NumericError("threshold below the bottom of the spectrum");
    WeylCount out;
    out.count = count;
    out.coefficient = count / pow(t, Real(Rational(m, e.growth_degree)));
    return out;
}

DixmierReport dixmier_estimate(std::vector<Real> mu) {
    if (mu.size() < 16) throw NumericError("need at least 16 singular values");
    std::sort(mu.begin(), mu.end(), [](const Real& a, const Real& b) { return a > b; });
    if (mu.back().sign() < 0) throw NumericError("negative singular value");
    const size_t n = mu.size();
    const size_t h = n / 2;
    Real s_half(0), s_full(0);
    for (size_t i = 0; i < n; ++i) {
        s_full = s_full + mu[i];
        if (i < h) s_half = s_half + mu[i];
    }
    Real u1 = Real(1) / log(Real(long(n)));
    Real u2 = Real(1) / log(Real(long(h)));
    DixmierReport rep;
    rep.sigma_full = s_full * u1;
    rep.sigma_half = s_half * u2;
    if (rep.sigma_half.is_zero()) {
        rep.estimate = Real(0);
        rep.decay_ratio = Real(0);
        return rep;
    }
    rep.decay_ratio = rep.sigma_full / rep.sigma_half;
    if (rep.decay_ratio > Real("1.2"))
        throw NumericError("sequence is outside the weak trace ideal for this estimator");
    rep.estimate = rep.sigma_full - u1 * (rep.sigma_full - rep.sigma_half) / (u1 - u2);
    return rep;
}

DixmierReport dixmier_estimate(const EigenLattice& e, const WeightSpec& w) {
    if (w.power && *w.power > 0)
        throw ExactDomainError("weight power must be nonpositive");
    std::vector<Real> mu;
    for (const auto& en : e.entries) {
        Real v = abs(en.weight);
        if (w.character) {
            auto it = w.character->coef.find(en.mode[size_t(w.character->axis)]);
            if (it == w.character->coef.end() || it->second == 0) continue;
            v = v * Real(Rational(abs(it->second)));
        }
        if (w.power) v = v * pow(en.lambda, Real(*w.power));
        mu.push_back(v);
    }
    return dixmier_estimate(std::move(mu));
}

Json expansion_to_json(const AsymptoticExpansion& e) {
    Json j = Json::object();
    j["kind"] = kind_name(e.kind);
    if (e.kind == AsymptoticExpansion::Kind::resolvent) j["power"] = e.resolvent_power;
    Json terms = Json::array();
    for (const auto& t : e.terms) {
        Json o = Json::object();
        o["s"] = rational_to_string(t.s);
        o["q"] = t.logpow;
        o["coeff"] = t.coeff.str(40);
        terms.push_back(std::move(o));
    }
    j["terms"] = std::move(terms);
    return j;
}

AsymptoticExpansion expansion_from_json(const Json& j) {
    if (!j.is_object()) throw SchemaError("expansion must be an object");
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw SchemaError("expansion needs a 'kind' string");
    AsymptoticExpansion e;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "heat") e.kind = AsymptoticExpansion::Kind::heat;
    else if (kind == "zeta") e.kind = AsymptoticExpansion::Kind::zeta;
    else if (kind == "resolvent") e.kind = AsymptoticExpansion::Kind::resolvent;
    else throw SchemaError("unknown expansion kind '" + kind + "'");
    if (e.kind == AsymptoticExpansion::Kind::resolvent) {
        if (!j.contains("power") || !j.at("power").is_number_integer())
            throw SchemaError("resolvent expansion needs an integer 'power'");
        e.resolvent_power = j.at("power").get<int>();
        if (e.resolvent_power < 1) throw SchemaError("resolvent power must be positive");
    }
    if (!j.contains("terms") || !j.at("terms").is_array())
        throw SchemaError("expansion needs a 'terms' array");
    for (const Json& o : j.at("terms")) {
        if (!o.is_object()) throw SchemaError("expansion term must be an object");
        if (!o.contains("s") || !o.at("s").is_string())
            throw SchemaError("expansion term needs a rational 's'");
        if (!o.contains("q") || !o.at("q").is_number_integer())
            throw SchemaError("expansion term needs an integer 'q'");
        if (!o.contains("coeff") || !o.at("coeff").is_string())
            throw SchemaError("expansion term needs a 'coeff' string");
        ExpansionTerm t;
        t.s = rational_from_string(o.at("s").get<std::string>());
        t.logpow = o.at("q").get<int>();
        if (t.logpow < 0) throw SchemaError("log powers must be nonnegative");
        t.coeff = Real(o.at("coeff").get<std::string>());
        e.terms.push_back(std::move(t));
    }
    canonical_term_order(e.terms);
    return e;
}

} // namespace torcal
