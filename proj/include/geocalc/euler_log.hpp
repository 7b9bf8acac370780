#pragma once

// Natural logarithm and antilogarithm against the cascade value of e.

#include "euler.hpp"
#include "exponent_solver.hpp"
#include "root_search.hpp"

namespace geocalc {

/// ln a as a plain real (ln 1 = 0 has no SignedScaled form).
inline Real natural_log(const SignedScaled& a, const CfOptions& opt = {}, const EngineConfig& cfg = {})
{
    precision_guard g(cfg.precision);
    if (a.negative())
        throw calc_error(errc::domain_error, "logarithm needs a positive argument");
    if (a.is_power_of_ten() && a.exponent() == 1)
        return Real(0);
    if (cfg.mode == backend::oracle)
        return Real(oracle::ln(a, cfg.precision));
    SignedScaled e = SignedScaled::from_real(cached_euler_e(cfg.precision));
    bool below = compare_abs(a, SignedScaled::from_real(Real(1))) < 0;
    // a < 1: e^n = a has n < 0, recover it from 1/a
    SignedScaled target = below ? oracle::recip(a, cfg.precision) : a;
    Rational r = evaluate_cf(recover_rational_exponent(e, target, opt, cfg));
    Real value = Real(r.numerator) / Real(r.denominator);
    return below ? Real(-value) : value;
}

/// Denominator used for the fractional part of the antilog exponent.
inline constexpr std::int64_t antilog_denominator = 1'000'000'000'000'000;  // 10^15

/// e^y: integer part by cascade, fractional part as a rational power of e.
inline SignedScaled antilog(const Real& y, const EngineConfig& cfg = {})
{
    precision_guard g(cfg.precision);
    if (y == 0)
        return SignedScaled::from_real(Real(1));
    if (cfg.mode == backend::oracle)
        return oracle::exp(OracleReal(y), cfg.precision);
    Real whole = floor(y);
    if (abs(whole) > Real(max_exponent))
        throw calc_error(errc::exponent_overflow, "antilog argument too large");
    auto k = whole.convert_to<std::int64_t>();
    Real frac = y - whole;
    Real scaled = frac * Real(antilog_denominator);
    Real rounded = floor(scaled + Real(1) / 2);
    auto m = rounded.convert_to<std::int64_t>();
    if (m == antilog_denominator) {
        m = 0;
        k = exponent_add(k, 1);
    }
    EngineConfig quiet = cfg;
    quiet.trace = nullptr;
    SignedScaled e = SignedScaled::from_real(cached_euler_e(cfg.precision));
    std::optional<SignedScaled> result;
    if (k != 0)
        result = detail::power_any(e, k, quiet);
    if (m != 0) {
        SignedScaled f = rational_power(e, m, antilog_denominator, power_strategy::split, quiet);
        result = result ? multiply(*result, f, quiet) : f;
    }
    if (!result)
        return SignedScaled::from_real(Real(1));
    return *result;
}

inline SignedScaled antilog(const SignedScaled& y, const EngineConfig& cfg = {})
{
    precision_guard g(cfg.precision);
    if (y.exponent() > 20)
        throw calc_error(errc::exponent_overflow, "antilog argument too large");
    return antilog(y.to<Real>(), cfg);
}

}  // namespace geocalc
