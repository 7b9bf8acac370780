#pragma once

// Recovering exponents: integer n in x^n = a by stepping the cascade, and
// m/n in x^(m/n) = a as a continued fraction.

#include "euler.hpp"

#include <sstream>
#include <vector>

namespace geocalc {

struct Rational {
    BigInt numerator = 0;
    BigInt denominator = 1;

    std::string to_text() const { return numerator.str() + "/" + denominator.str(); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

struct ContinuedFraction {
    std::vector<BigInt> terms;
    bool terminated = false;

    /// `[10; 1, 8, 20]`
    std::string to_text() const
    {
        std::ostringstream os;
        os << '[';
        for (std::size_t i = 0; i < terms.size(); ++i) {
            if (i == 1)
                os << "; ";
            else if (i > 1)
                os << ", ";
            os << terms[i].str();
        }
        os << ']';
        return os.str();
    }

    void validate() const
    {
        if (terms.empty())
            throw calc_error(errc::domain_error, "continued fraction needs at least one term");
        if (terms[0] < 0)
            throw calc_error(errc::domain_error, "leading term must be >= 0");
        for (std::size_t i = 1; i < terms.size(); ++i)
            if (terms[i] < 1)
                throw calc_error(errc::domain_error, "terms after the first must be >= 1");
    }
};

struct CfOptions {
    std::int64_t max_depth = 16;
    double cf_tol = 1e-12;
    /// Largest single term searched for.
    std::int64_t max_term = 1'000'000'000'000;
};

/// Back-substitution in exact integers.
inline Rational evaluate_cf(const ContinuedFraction& cf)
{
    cf.validate();
    BigInt num = cf.terms.back(), den = 1;
    for (std::size_t i = cf.terms.size() - 1; i-- > 0;) {
        // value = t + den/num
        BigInt next = cf.terms[i] * num + den;
        den = num;
        num = next;
    }
    BigInt g = gcd(num, den);
    return Rational{num / g, den / g};
}

/// Integer n with x^n = a (both given), up to max_n.
inline std::int64_t solve_integer_exponent(const SignedScaled& x, const SignedScaled& a, std::int64_t max_n,
                                           const EngineConfig& cfg = {})
{
    precision_guard g(cfg.precision);
    if (max_n < 1)
        throw calc_error(errc::domain_error, "max_n must be >= 1");
    if (x.is_power_of_ten() && x.exponent() == 1 && !x.negative())
        throw calc_error(errc::domain_error, "x = 1 has every power equal to 1");
    // negative base: y = -x, b = -a with odd n, or b = a with even n
    int parity = -1;  // -1 any, 0 even, 1 odd
    if (x.negative())
        parity = a.negative() ? 1 : 0;
    else if (a.negative())
        throw calc_error(errc::no_integer_exponent, "positive base never gives a negative power");
    if (x.is_power_of_ten() && x.exponent() == 1)
        throw calc_error(errc::no_integer_exponent, "powers of -1 only reach +-1");

    // |x| > 1: cos C = 1/|x| with target 1/|a|; |x| < 1: cos C = |x| with target |a|
    bool above = compare_abs(x, SignedScaled::from_real(Real(1))) > 0;
    Real cos_c = above ? Real(1 / x.abs().to<Real>()) : x.abs().to<Real>();
    Real target = above ? Real(1 / a.abs().to<Real>()) : a.abs().to<Real>();
    Real tol("1e-9");
    Real p = 1;
    for (std::int64_t n = 1; n <= max_n; ++n) {
        p *= cos_c;
        if (abs(p - target) <= tol * target) {
            if (parity == -1 || n % 2 == parity)
                return n;
            break;
        }
        if (p < target)
            break;
    }
    throw calc_error(errc::no_integer_exponent, "no n <= " + std::to_string(max_n) + " gives a within tolerance");
}

/// Integer n with x^(1/n) = a: the roles of x and a swap.
inline std::int64_t solve_root_index(const SignedScaled& x, const SignedScaled& a, std::int64_t max_n,
                                     const EngineConfig& cfg = {})
{
    return solve_integer_exponent(a, x, max_n, cfg);
}

namespace detail {

/// Largest N >= 0 with base^N >= target (1 - tol), base and target in (0, 1).
/// Brackets by squaring, then fixes the bits of N from the top.
inline BigInt largest_power_above(const OracleReal& base, const OracleReal& target, const OracleReal& tol,
                                  std::int64_t max_term, OracleReal& base_to_n)
{
    OracleReal floor_value = target * (1 - tol);
    std::vector<OracleReal> squares{base};  // base^(2^j)
    while (squares.back() >= floor_value) {
        if ((std::int64_t(1) << squares.size()) > max_term)
            break;
        squares.push_back(squares.back() * squares.back());
    }
    BigInt n = 0;
    OracleReal acc = 1;
    for (std::size_t j = squares.size(); j-- > 0;) {
        OracleReal trial = acc * squares[j];
        if (trial >= floor_value) {
            acc = trial;
            n += BigInt(1) << j;
        }
    }
    base_to_n = acc;
    return n;
}

}  // namespace detail

/// Continued fraction of the exponent q in x^q = a.
inline ContinuedFraction recover_rational_exponent(const SignedScaled& x, const SignedScaled& a, const CfOptions& opt = {},
                                                   const EngineConfig& cfg = {})
{
    precision_guard g(cfg.precision);
    if (x.negative() || a.negative())
        throw calc_error(errc::domain_error, "exponent recovery needs positive x and a");
    SignedScaled one = SignedScaled::from_real(Real(1));
    int cx = compare_abs(x, one), ca = compare_abs(a, one);
    if (x.is_power_of_ten() && x.exponent() == 1)
        cx = 0;
    if (a.is_power_of_ten() && a.exponent() == 1)
        ca = 0;
    if (cx == 0 || ca == 0)
        throw calc_error(errc::domain_error, "x and a must differ from 1");
    if (cx != ca)
        throw calc_error(errc::domain_error, "exponent would be negative");
    if (opt.max_depth < 1)
        throw calc_error(errc::domain_error, "max_depth must be >= 1");

    // both into (0, 1): (1/x)^q = 1/a when x, a > 1
    OracleReal u = x.to<OracleReal>(), v = a.to<OracleReal>();
    if (cx > 0) {
        u = 1 / u;
        v = 1 / v;
    }
    OracleReal tol(opt.cf_tol);
    ContinuedFraction cf;
    OracleReal base = u, target = v;
    for (;;) {
        OracleReal base_to_n;
        BigInt n = detail::largest_power_above(base, target, tol, opt.max_term, base_to_n);
        cf.terms.push_back(n);
        if (n >= opt.max_term)
            break;
        OracleReal w = target / base_to_n;
        if (!(w > base))
            throw calc_error(errc::no_convergence, "residual fell below its base");
        if (abs(w - 1) <= tol) {
            cf.terminated = true;
            break;
        }
        if (w > 1)
            throw calc_error(errc::no_convergence, "residual above 1");
        if (static_cast<std::int64_t>(cf.terms.size()) >= opt.max_depth)
            break;
        target = base;
        base = w;
    }
    return cf;
}

struct LogRatio {
    ContinuedFraction p;  // (1/e)^p = 1/a
    ContinuedFraction q;  // (1/e)^q = 1/x
    SignedScaled ratio;
};

/// m/n = ln a / ln x with both logarithms recovered against the module's e.
inline LogRatio recover_exponent_via_logs(const SignedScaled& x, const SignedScaled& a, const CfOptions& opt = {},
                                          const EngineConfig& cfg = {})
{
    precision_guard g(cfg.precision);
    SignedScaled e = SignedScaled::from_real(cached_euler_e(cfg.precision));
    SignedScaled one = SignedScaled::from_real(Real(1));
    // both below 1 flip to above 1; the ratio is unchanged
    SignedScaled xx = x, aa = a;
    if (!x.negative() && !a.negative() && compare_abs(x, one) < 0 && compare_abs(a, one) < 0) {
        xx = oracle::recip(x, cfg.precision);
        aa = oracle::recip(a, cfg.precision);
    }
    LogRatio out{recover_rational_exponent(e, aa, opt, cfg), recover_rational_exponent(e, xx, opt, cfg), one};
    Rational p = evaluate_cf(out.p), q = evaluate_cf(out.q);
    OracleReal r = OracleReal(p.numerator * q.denominator) / OracleReal(p.denominator * q.numerator);
    out.ratio = SignedScaled::from_real(r);
    return out;
}

}  // namespace geocalc
