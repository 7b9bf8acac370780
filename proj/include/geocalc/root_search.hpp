#pragma once

// n-th roots and rational powers by turning the hypotenuse until the n-th
// perpendicular of the cascade has a prescribed length.

#include "cascade.hpp"

#include <functional>
#include <numeric>
#include <optional>

namespace geocalc {

struct RootQuery {
    SignedScaled radicand;
    std::int64_t n = 1;
    /// Radicand given as l/m; when set it replaces `radicand`.
    std::optional<std::pair<SignedScaled, SignedScaled>> numerator_form;

    static RootQuery fraction(SignedScaled l, SignedScaled m, std::int64_t n)
    {
        return RootQuery{l, n, std::make_pair(std::move(l), std::move(m))};
    }
};

/// One bisection step as seen by an observer; f(c) = scale * c^n.
struct bracket_step {
    Real lo, hi, f_lo, f_hi, target;
};

struct cosine_search {
    Real cos_c;
    int iterations = 0;
    std::vector<double> trials;  // first few cosines, for the trace
};

enum class power_strategy { compose, split };

/// x^(m/n) as mantissa_part * residue * 10^power_of_ten.
struct RationalPowerParts {
    SignedScaled mantissa_part;  // M^(m/n)
    SignedScaled residue;        // 10^(-s/n), 0 <= s < n
    std::int64_t power_of_ten = 0;
    SignedScaled value;
};

/// Bisection on cos C in (0, 1) for scale * cos^n C = target, target in (0, scale).
inline cosine_search search_cosine(const Real& scale, std::int64_t n, const Real& target, const EngineConfig& cfg,
                                   const std::function<void(const bracket_step&)>& observe = {})
{
    if (!(target > 0 && target < scale))
        throw calc_error(errc::domain_error, "target length must lie between 0 and AB");
    Real tol = cfg.precision.rel_tol();
    Real lo = 0, hi = 1;
    Real f_lo = 0, f_hi = scale;
    cosine_search out;
    for (int it = 1; it <= 200; ++it) {
        Real mid = (lo + hi) / 2;
        Real f = detail::cascade_length(mid, scale, n, cfg.literal_depth);
        if (out.trials.size() < 6)
            out.trials.push_back(mid.convert_to<double>());
        if (f < target) {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
            f_hi = f;
        }
        if (!(f_lo <= target && target <= f_hi))
            throw calc_error(errc::no_convergence, "bracket lost the target");
        if (observe)
            observe({lo, hi, f_lo, f_hi, target});
        out.iterations = it;
        if (hi - lo < tol * hi) {
            out.cos_c = (lo + hi) / 2;
            return out;
        }
    }
    throw calc_error(errc::no_convergence, "cos C search did not settle in 200 steps");
}

namespace detail {

/// Root of a mantissa-sized radicand y in (0, 1): cos^n C = y with AB = 1 (y < 1),
/// or y cos^n C = 1 with AB = y and the result 1/cos C (y > 1).
inline Real root_by_search(const Real& y, std::int64_t n, const EngineConfig& cfg, GeometricPrimitiveTrace* t)
{
    if (y == 1)
        return y;
    bool above = y > 1;
    cosine_search s = above ? search_cosine(y, n, Real(1), cfg) : search_cosine(Real(1), n, y, cfg);
    Real result = above ? Real(1 / s.cos_c) : s.cos_c;
    if (t && n <= 48) {
        // even n holds the n-th perpendicular on the base; odd n holds p_(n+1) and reads BD
        std::size_t depth = static_cast<std::size_t>(n % 2 == 0 ? n : n + 1);
        double c = s.cos_c.convert_to<double>();
        double last = above ? 1.0 : y.convert_to<double>();
        double ab = above ? y.convert_to<double>() : 1.0;
        if (n % 2 != 0)
            last *= c;
        figure::emit_root_search(*t, depth, last, s.trials, c, figure::num(ab), n % 2 == 0 ? 0 : 1);
    }
    return result;
}

/// 10^(r/n) for 0 < r < n, as the root of 10^r (> 1).
inline SignedScaled ten_power_root(std::int64_t r, std::int64_t n, const EngineConfig& cfg)
{
    EngineConfig quiet = cfg;
    quiet.trace = nullptr;
    if (r % n == 0)
        return SignedScaled::from_real(Real(1), r / n);
    std::int64_t whole = floor_div(r, n);
    std::int64_t rest = r - whole * n;
    // GMP floats carry a wide binary exponent, so AB = 10^rest is fine even for large n
    Real y = pow10<Real>(rest);
    Real root = root_by_search(y, n, quiet, nullptr);
    return SignedScaled::from_real(root, whole);
}

inline void check_between_one_and(const SignedScaled& x_abs, SignedScaled& root_abs, const EngineConfig& cfg)
{
    // x in (0,1) gives a root in [x, 1]; x > 1 gives [1, x]
    SignedScaled one = SignedScaled::from_real(Real(1));
    bool below = compare_abs(x_abs, one) < 0;
    const SignedScaled& lo = below ? x_abs : one;
    const SignedScaled& hi = below ? one : x_abs;
    OracleReal slack = 10 * OracleReal(cfg.precision.rel_tol());
    if (compare_abs(root_abs, lo) < 0) {
        if (relative_difference(root_abs, lo) > slack)
            throw calc_error(errc::no_convergence, "root left its monotonicity interval");
        root_abs = lo;
    } else if (compare_abs(root_abs, hi) > 0) {
        if (relative_difference(root_abs, hi) > slack)
            throw calc_error(errc::no_convergence, "root left its monotonicity interval");
        root_abs = hi;
    }
}

inline SignedScaled nth_root_unbounded(const SignedScaled& x, std::int64_t n, const EngineConfig& cfg)
{
    if (n < 1)
        throw calc_error(errc::domain_error, "root index must be >= 1");
    if (x.negative() && n % 2 == 0)
        throw calc_error(errc::even_root_of_negative, "even root of a negative number has no real value");
    if (n == 1)
        return x;
    precision_guard g(cfg.precision);
    if (cfg.mode == backend::oracle)
        return oracle::root(x, n, cfg.precision);

    // |x| = M 10^e with e = n k + r, 0 <= r < n; root = M^(1/n) 10^(r/n) 10^k
    std::int64_t e = x.exponent();
    std::int64_t k = floor_div(e, n);
    std::int64_t r = e - k * n;
    if (x.is_power_of_ten() && floor_div(e - 1, n) * n == e - 1)
        return SignedScaled(x.sign(), x.mantissa(), exponent_add((e - 1) / n, 1));

    Real m_root = root_by_search(x.working_mantissa(), n, cfg, cfg.sink());
    SignedScaled root = SignedScaled::from_real(m_root, k);
    if (r != 0) {
        EngineConfig quiet = cfg;
        quiet.trace = nullptr;
        root = multiply(root, ten_power_root(r, n, cfg), quiet);
    }
    SignedScaled x_abs = x.abs();
    check_between_one_and(x_abs, root, cfg);
    return x.negative() ? -root : root;
}

inline std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }

}  // namespace detail

inline SignedScaled nth_root(const RootQuery& q, const EngineConfig& cfg = {})
{
    if (q.numerator_form) {
        EngineConfig quiet = cfg;
        quiet.trace = nullptr;
        SignedScaled x = divide(q.numerator_form->first, q.numerator_form->second, divide_method::hypotenuse, quiet);
        return detail::nth_root_unbounded(x, q.n, cfg);
    }
    return detail::nth_root_unbounded(q.radicand, q.n, cfg);
}

inline SignedScaled nth_root(const SignedScaled& x, std::int64_t n, const EngineConfig& cfg = {})
{
    return nth_root(RootQuery{x, n, std::nullopt}, cfg);
}

/// x^(m/n) kept in its three factors; split strategy only.
inline RationalPowerParts rational_power_parts(const SignedScaled& x, std::int64_t m, std::int64_t n, const EngineConfig& cfg = {})
{
    if (n < 1)
        throw calc_error(errc::domain_error, "denominator must be >= 1");
    if (m == 0)
        throw calc_error(errc::domain_error, "numerator must be nonzero");
    std::int64_t d = detail::gcd64(m, n);
    m /= d;
    n /= d;
    if (x.negative() && n % 2 == 0)
        throw calc_error(errc::even_root_of_negative, "even root of a negative number has no real value");
    precision_guard g(cfg.precision);
    EngineConfig quiet = cfg;
    quiet.trace = nullptr;

    // 10^(e m / n) = 10^ceil(e m / n) * 10^(-s/n)
    std::int64_t em = exponent_mul(x.exponent(), m);
    std::int64_t up = ceil_div(em, n);
    std::int64_t s = up * n - em;

    // M^(m/n) = M^m1 * (M^(1/n))^m2 with m = n m1 + m2
    SignedScaled M = SignedScaled(1, x.mantissa(), 0);
    std::int64_t m1 = floor_div(m, n);
    std::int64_t m2 = m - m1 * n;
    std::optional<SignedScaled> mant;
    if (m1 != 0)
        mant = detail::power_any(M, m1, quiet);
    if (m2 != 0) {
        SignedScaled frac = detail::power_any(detail::nth_root_unbounded(M, n, cfg), m2, quiet);
        mant = mant ? multiply(*mant, frac, quiet) : frac;
    }
    SignedScaled residue = SignedScaled::from_real(Real(1));
    if (s != 0)
        residue = detail::nth_root_unbounded(SignedScaled::from_real(Real(1), -s), n, quiet);
    SignedScaled value = multiply(*mant, residue, quiet);
    value = SignedScaled(value.sign(), value.mantissa(), exponent_add(value.exponent(), up));
    bool negative = x.negative() && m % 2 != 0;
    if (negative)
        value = -value;
    return RationalPowerParts{*mant, residue, up, value};
}

inline SignedScaled rational_power(const SignedScaled& x, std::int64_t m, std::int64_t n,
                                   power_strategy strategy = power_strategy::split, const EngineConfig& cfg = {})
{
    if (n < 1)
        throw calc_error(errc::domain_error, "denominator must be >= 1");
    if (m == 0)
        throw calc_error(errc::domain_error, "numerator must be nonzero");
    std::int64_t d = detail::gcd64(m, n);
    if (x.negative() && (n / d) % 2 == 0)
        throw calc_error(errc::even_root_of_negative, "even root of a negative number has no real value");
    precision_guard g(cfg.precision);
    if (cfg.mode == backend::oracle)
        return oracle::rational_pow(x, m / d, n / d, cfg.precision);
    if (strategy == power_strategy::split)
        return rational_power_parts(x, m, n, cfg).value;
    EngineConfig quiet = cfg;
    quiet.trace = nullptr;
    SignedScaled xm = detail::power_any(x, m / d, quiet);
    return detail::nth_root_unbounded(xm, n / d, cfg);
}

}  // namespace geocalc
