#pragma once

// High-precision reference arithmetic on SignedScaled values. Everything here
// goes through MPFR's correctly rounded pow/log/exp/sqrt and shares no code
// path with the construction backend, so tests can use it as ground truth.

#include "numeric_core.hpp"

#include <span>
#include <vector>

namespace geocalc::oracle {

namespace detail {

inline OracleReal log10_of(const SignedScaled& x)
{
    return log10(x.mantissa()) + OracleReal(x.exponent());
}

/// Builds a SignedScaled from sign * 10^(L) where L = whole + frac exactly.
inline SignedScaled from_log10(int sign, std::int64_t whole, const OracleReal& frac)
{
    OracleReal m = pow(OracleReal(10), frac);
    return SignedScaled::from_real(OracleReal(sign * m), whole);
}

}  // namespace detail

inline SignedScaled pow(const SignedScaled& x, std::int64_t n, const PrecisionPolicy& policy = {})
{
    precision_guard g(policy);
    if (n == 0)
        return SignedScaled(1, OracleReal(1) / 10, 1);
    OracleReal m = boost::multiprecision::pow(x.mantissa(), OracleReal(n));
    int sign = (x.negative() && (n % 2 != 0)) ? -1 : 1;
    return SignedScaled::from_real(OracleReal(sign * m), exponent_mul(x.exponent(), n));
}

/// x^(m/n), n >= 1; negative x needs odd n.
inline SignedScaled rational_pow(const SignedScaled& x, std::int64_t m, std::int64_t n, const PrecisionPolicy& policy = {})
{
    precision_guard g(policy);
    if (n < 1)
        throw calc_error(errc::domain_error, "root index must be >= 1");
    if (x.negative() && n % 2 == 0)
        throw calc_error(errc::even_root_of_negative, "even root of a negative number");
    // log10|x|^(m/n) = (m*e + m*log10 M) / n, split so the integer part stays exact.
    BigInt me = BigInt(m) * BigInt(x.exponent());
    BigInt q = me / n;
    BigInt r = me - q * n;
    if (r < 0) {
        r += n;
        q -= 1;
    }
    OracleReal frac = (OracleReal(r) + OracleReal(m) * log10(x.mantissa())) / OracleReal(n);
    OracleReal fl = floor(frac);
    frac -= fl;
    BigInt whole = q + BigInt(fl);
    if (whole > max_exponent || whole < -max_exponent)
        throw calc_error(errc::exponent_overflow, "result exponent out of range");
    int sign = (x.negative() && (m % 2 != 0)) ? -1 : 1;
    return detail::from_log10(sign, static_cast<std::int64_t>(whole), frac);
}

inline SignedScaled root(const SignedScaled& x, std::int64_t n, const PrecisionPolicy& policy = {})
{
    return rational_pow(x, 1, n, policy);
}

inline SignedScaled mul(const SignedScaled& a, const SignedScaled& b, const PrecisionPolicy& policy = {})
{
    precision_guard g(policy);
    return SignedScaled::from_real(OracleReal(a.sign() * b.sign() * a.mantissa() * b.mantissa()),
                                   exponent_add(a.exponent(), b.exponent()));
}

inline SignedScaled div(const SignedScaled& a, const SignedScaled& b, const PrecisionPolicy& policy = {})
{
    precision_guard g(policy);
    return SignedScaled::from_real(OracleReal(a.sign() * b.sign() * a.mantissa() / b.mantissa()),
                                   exponent_add(a.exponent(), -b.exponent()));
}

inline SignedScaled recip(const SignedScaled& x, const PrecisionPolicy& policy = {})
{
    precision_guard g(policy);
    return SignedScaled::from_real(OracleReal(x.sign() / x.mantissa()), -x.exponent());
}

/// sqrt(|a||b|), negative when both inputs are negative.
inline SignedScaled gmean(const SignedScaled& a, const SignedScaled& b, const PrecisionPolicy& policy = {})
{
    precision_guard g(policy);
    if (a.sign() != b.sign())
        throw calc_error(errc::sign_mismatch, "geometric mean needs operands of one sign");
    std::int64_t esum = exponent_add(a.exponent(), b.exponent());
    std::int64_t half = floor_div(esum, 2);
    OracleReal prod = a.mantissa() * b.mantissa();
    if (esum - 2 * half == 1)
        prod *= 10;
    return SignedScaled::from_real(OracleReal(a.sign() * sqrt(prod)), half);
}

/// Natural logarithm of a positive value as a plain real (may be zero).
inline OracleReal ln(const SignedScaled& a, const PrecisionPolicy& policy = {})
{
    precision_guard g(policy);
    if (a.negative())
        throw calc_error(errc::domain_error, "logarithm of a negative number");
    if (a.is_power_of_ten())
        return OracleReal(a.exponent() - 1) * log(OracleReal(10));
    return log(a.mantissa()) + OracleReal(a.exponent()) * log(OracleReal(10));
}

inline SignedScaled exp(const OracleReal& y, const PrecisionPolicy& policy = {})
{
    precision_guard g(policy);
    OracleReal l10 = y / log(OracleReal(10));
    OracleReal whole = floor(l10);
    if (abs(whole) > OracleReal(max_exponent))
        throw calc_error(errc::exponent_overflow, "exp argument too large");
    // Re-derive the fraction from y so large arguments keep their low digits.
    OracleReal frac_ln = y - whole * log(OracleReal(10));
    OracleReal m = boost::multiprecision::exp(frac_ln);
    return SignedScaled::from_real(m, static_cast<std::int64_t>(whole));
}

inline OracleReal euler_e(const PrecisionPolicy& policy = {})
{
    precision_guard g(policy);
    return boost::multiprecision::exp(OracleReal(1));
}

enum class op { pow, root, mul, div, gmean, recip, ln, exp };

/// Dispatcher over the named reference operations. Integer arguments (pow, root)
/// are passed as integer-valued SignedScaled; ln and exp map between the
/// positive reals and SignedScaled, so ln(1) is reported as ZeroNotRepresentable.
inline SignedScaled oracle_eval(op which, std::span<const SignedScaled> args, const PrecisionPolicy& policy = {})
{
    auto need = [&](std::size_t k) {
        if (args.size() != k)
            throw calc_error(errc::domain_error, "wrong number of oracle arguments");
    };
    auto as_int = [&](const SignedScaled& v) -> std::int64_t {
        precision_guard g(policy);
        OracleReal r = v.to<OracleReal>();
        if (r != floor(r) || abs(r) > OracleReal(max_exponent))
            throw calc_error(errc::domain_error, "expected an integer argument");
        return static_cast<std::int64_t>(r);
    };
    switch (which) {
    case op::pow: need(2); return pow(args[0], as_int(args[1]), policy);
    case op::root: need(2); return root(args[0], as_int(args[1]), policy);
    case op::mul: need(2); return mul(args[0], args[1], policy);
    case op::div: need(2); return div(args[0], args[1], policy);
    case op::gmean: need(2); return gmean(args[0], args[1], policy);
    case op::recip: need(1); return recip(args[0], policy);
    case op::ln: {
        need(1);
        OracleReal v = ln(args[0], policy);
        precision_guard g(policy);
        return SignedScaled::from_real(v);
    }
    case op::exp: {
        need(1);
        precision_guard g(policy);
        return exp(args[0].to<OracleReal>(), policy);
    }
    }
    throw calc_error(errc::domain_error, "unknown oracle operation");
}

}  // namespace geocalc::oracle
