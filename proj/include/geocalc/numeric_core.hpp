#pragma once

// Number representation shared by every geocalc module: a nonzero real
// written as sign * mantissa * 10^exponent with the mantissa in [0.1, 1).

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace geocalc {

namespace mp = boost::multiprecision;

/// Construction-backend arithmetic (GMP mpf, Boost generic transcendental ops).
using Real = mp::number<mp::gmp_float<0>, mp::et_off>;
/// Oracle arithmetic (MPFR, correctly rounded). Never used by construction code paths.
using OracleReal = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;
using BigInt = mp::mpz_int;
using BigRational = mp::mpq_rational;

enum class errc {
    parse_error,
    zero_not_representable,
    domain_error,
    degenerate_angle,
    exponent_overflow,
    sign_mismatch,
    even_root_of_negative,
    no_integer_exponent,
    arm_out_of_range,
    depth_exceeded,
    not_fastened,
    no_convergence,
    inconsistent_trace,
};

constexpr std::string_view errc_name(errc c) noexcept
{
    switch (c) {
    case errc::parse_error: return "ParseError";
    case errc::zero_not_representable: return "ZeroNotRepresentable";
    case errc::domain_error: return "DomainError";
    case errc::degenerate_angle: return "DegenerateAngle";
    case errc::exponent_overflow: return "ExponentOverflow";
    case errc::sign_mismatch: return "SignMismatch";
    case errc::even_root_of_negative: return "EvenRootOfNegative";
    case errc::no_integer_exponent: return "NoIntegerExponent";
    case errc::arm_out_of_range: return "ArmOutOfRange";
    case errc::depth_exceeded: return "DepthExceeded";
    case errc::not_fastened: return "NotFastened";
    case errc::no_convergence: return "NoConvergence";
    case errc::inconsistent_trace: return "InconsistentTrace";
    }
    return "Unknown";
}

class calc_error : public std::runtime_error {
public:
    calc_error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code)
    {
    }
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

/// Largest decimal exponent magnitude carried by a SignedScaled.
inline constexpr std::int64_t max_exponent = 1'000'000'000'000'000;  // 10^15

inline std::int64_t checked_exponent(std::int64_t e)
{
    if (e > max_exponent || e < -max_exponent)
        throw calc_error(errc::exponent_overflow, "decimal exponent " + std::to_string(e) + " out of range");
    return e;
}

inline std::int64_t exponent_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r))
        throw calc_error(errc::exponent_overflow, "exponent product overflows");
    return checked_exponent(r);
}

inline std::int64_t exponent_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r))
        throw calc_error(errc::exponent_overflow, "exponent sum overflows");
    return checked_exponent(r);
}

/// Floor division for exponents (C++ '/' truncates toward zero).
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) noexcept
{
    return -floor_div(-a, b);
}

struct PrecisionPolicy {
    int working_digits = 30;
    int oracle_digits = 60;
    /// Relative tolerance for construction searches; 0 means 10^(1 - working_digits).
    double rel_tol_override = 0.0;

    void validate() const
    {
        if (working_digits < 15)
            throw calc_error(errc::domain_error, "working_digits must be >= 15");
        if (oracle_digits < 2 * working_digits)
            throw calc_error(errc::domain_error, "oracle_digits must be >= 2 * working_digits");
        if (rel_tol_override < 0.0)
            throw calc_error(errc::domain_error, "rel_tol must be positive");
    }

    Real rel_tol() const
    {
        if (rel_tol_override > 0.0)
            return Real(rel_tol_override);
        return pow(Real(10), 1 - working_digits);
    }
};

/// Sets the process-wide default precision of both arithmetic types for the
/// lifetime of the guard. Boost 1.74 keeps the default precision in a global,
/// so precision changes must not race with computations on other threads.
class precision_guard {
public:
    explicit precision_guard(const PrecisionPolicy& p)
        : precision_guard(static_cast<unsigned>(p.working_digits), static_cast<unsigned>(p.oracle_digits))
    {
    }
    precision_guard(unsigned working, unsigned oracle)
        : saved_real_(Real::default_precision()), saved_oracle_(OracleReal::default_precision())
    {
        Real::default_precision(working);
        OracleReal::default_precision(oracle);
    }
    ~precision_guard()
    {
        Real::default_precision(saved_real_);
        OracleReal::default_precision(saved_oracle_);
    }
    precision_guard(const precision_guard&) = delete;
    precision_guard& operator=(const precision_guard&) = delete;

private:
    unsigned saved_real_;
    unsigned saved_oracle_;
};

namespace detail {
/// Boost starts variable-precision types at 20 (MPFR) and 50 (GMP) digits;
/// start every program at the default policy instead.
inline const bool default_precision_installed = [] {
    PrecisionPolicy p;
    Real::default_precision(static_cast<unsigned>(p.working_digits));
    OracleReal::default_precision(static_cast<unsigned>(p.oracle_digits));
    return true;
}();
}  // namespace detail

/// 10^k by binary powering; exact for |k| small enough to fit the precision.
template <class R>
R pow10(std::int64_t k)
{
    R result = 1;
    R base = 10;
    std::uint64_t n = k < 0 ? static_cast<std::uint64_t>(-k) : static_cast<std::uint64_t>(k);
    while (n) {
        if (n & 1u)
            result *= base;
        n >>= 1;
        if (n)
            base *= base;
    }
    return k < 0 ? R(1 / result) : result;
}

namespace detail {

/// Approximate floor(log10|x|) from the binary exponent, off by at most one.
inline std::int64_t decimal_magnitude_estimate(const Real& x)
{
    long e2 = 0;
    double d = mpf_get_d_2exp(&e2, x.backend().data());
    // |x| = |d| * 2^e2 with |d| in [0.5, 1)
    return static_cast<std::int64_t>(std::floor((static_cast<double>(e2) + std::log2(std::fabs(d))) * 0.30102999566398120));
}

inline std::int64_t decimal_magnitude_estimate(const OracleReal& x)
{
    long e2 = 0;
    double d = mpfr_get_d_2exp(&e2, x.backend().data(), MPFR_RNDN);
    return static_cast<std::int64_t>(std::floor((static_cast<double>(e2) + std::log2(std::fabs(d))) * 0.30102999566398120));
}

}  // namespace detail

/// Splits a nonzero |x| into (m, e) with x = m * 10^e and m in [0.1, 1).
template <class R>
std::pair<R, std::int64_t> decimal_split(const R& x)
{
    R ax = abs(x);
    std::int64_t e = detail::decimal_magnitude_estimate(ax) + 1;
    R m = ax * pow10<R>(-e);
    // The estimate can be off by one in either direction.
    for (int guard = 0; guard < 4; ++guard) {
        if (m >= 1) {
            m /= 10;
            ++e;
        } else if (m < R(1) / 10) {
            m *= 10;
            --e;
        } else {
            break;
        }
    }
    return {m, e};
}

class SignedScaled {
public:
    /// Requires mantissa in [0.1, 1) and sign in {-1, +1}.
    SignedScaled(int sign, OracleReal mantissa, std::int64_t exponent)
        : sign_(sign), mantissa_(std::move(mantissa)), exponent_(checked_exponent(exponent))
    {
        if (sign_ != 1 && sign_ != -1)
            throw calc_error(errc::domain_error, "sign must be -1 or +1");
        OracleReal tenth(OracleReal(1, mantissa_.precision()) / 10, mantissa_.precision());
        if (mantissa_ < tenth || mantissa_ >= 1)
            throw calc_error(errc::domain_error, "mantissa " + mantissa_.str(20) + " not in [0.1, 1)");
    }

    /// Normalizes any nonzero finite value v * 10^extra_exponent.
    template <class R>
    static SignedScaled from_real(const R& v, std::int64_t extra_exponent = 0)
    {
        if (v == 0)
            throw calc_error(errc::zero_not_representable, "zero has no mantissa/exponent form");
        auto [m, e] = decimal_split(v);
        OracleReal om(m, std::max<unsigned>(m.precision(), OracleReal::default_precision()));
        // Conversion rounding can push a mantissa of 0.99999... up to 1.
        if (om >= 1) {
            om /= 10;
            ++e;
        }
        return SignedScaled(v < 0 ? -1 : 1, std::move(om), exponent_add(e, extra_exponent));
    }

    int sign() const noexcept { return sign_; }
    bool negative() const noexcept { return sign_ < 0; }
    const OracleReal& mantissa() const noexcept { return mantissa_; }
    std::int64_t exponent() const noexcept { return exponent_; }

    /// Mantissa in construction-backend arithmetic at the current working precision.
    Real working_mantissa() const { return Real(mantissa_); }

    /// True when the value is +-10^k up to the mantissa's own rounding.
    bool is_power_of_ten() const
    {
        unsigned prec = mantissa_.precision();
        OracleReal tenth(OracleReal(1, prec) / 10, prec);
        OracleReal slack = pow10<OracleReal>(-static_cast<std::int64_t>(prec) + 3);
        return mp::abs(mantissa_ - tenth) <= slack;
    }

    SignedScaled abs() const { return SignedScaled(1, mantissa_, exponent_); }
    SignedScaled operator-() const { return SignedScaled(-sign_, mantissa_, exponent_); }

    /// Full value as a real. Only meaningful while 10^exponent fits the type.
    template <class R>
    R to() const
    {
        R m(mantissa_);
        return sign_ * m * pow10<R>(exponent_);
    }

private:
    int sign_;
    OracleReal mantissa_;
    std::int64_t exponent_;
};

namespace detail {

struct parsed_decimal {
    bool negative = false;
    std::string digits;        // significant digits, no leading zeros
    std::int64_t exponent = 0; // value = 0.digits * 10^exponent
};

inline parsed_decimal parse_decimal(std::string_view text)
{
    auto fail = [&](const char* why) -> calc_error {
        return calc_error(errc::parse_error, std::string(why) + " in '" + std::string(text) + "'");
    };
    parsed_decimal out;
    std::size_t i = 0;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        out.negative = text[i] == '-';
        ++i;
    }
    std::string int_part, frac_part;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
        int_part += text[i++];
    if (int_part.empty())
        throw fail("expected digits");
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
            frac_part += text[i++];
    }
    std::int64_t exp10 = 0;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool eneg = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            eneg = text[i] == '-';
            ++i;
        }
        if (i >= text.size())
            throw fail("empty exponent");
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            exp10 = exp10 * 10 + (text[i] - '0');
            if (exp10 > max_exponent)
                throw calc_error(errc::exponent_overflow, "exponent too large in '" + std::string(text) + "'");
            ++i;
        }
        if (eneg)
            exp10 = -exp10;
    }
    if (i != text.size())
        throw fail("trailing characters");

    std::string all = int_part + frac_part;
    std::size_t lead = all.find_first_not_of('0');
    if (lead == std::string::npos)
        return out;  // zero: digits stay empty
    std::int64_t point = static_cast<std::int64_t>(int_part.size()) - static_cast<std::int64_t>(lead);
    std::string digits = all.substr(lead);
    digits.erase(digits.find_last_not_of('0') + 1);
    out.digits = std::move(digits);
    out.exponent = point + exp10;
    return out;
}

inline unsigned digits_for(const std::string& digits)
{
    // MPFR's library default is only 20 digits; never parse below 80.
    return std::max({OracleReal::default_precision(), static_cast<unsigned>(digits.size()) + 10, 80u});
}

}  // namespace detail

/// Parses the decimal grammar `[+-]digits[.digits][(e|E)[+-]digits]`.
inline SignedScaled normalize(std::string_view text)
{
    auto d = detail::parse_decimal(text);
    if (d.digits.empty())
        throw calc_error(errc::zero_not_representable, "zero is excluded: '" + std::string(text) + "'");
    OracleReal m(std::string("0.") + d.digits, detail::digits_for(d.digits));
    return SignedScaled(d.negative ? -1 : 1, std::move(m), d.exponent);
}

/// Parses the same grammar into a plain real; zero is allowed.
template <class R = Real>
R parse_real(std::string_view text)
{
    auto d = detail::parse_decimal(text);
    if (d.digits.empty())
        return R(0);
    R m(std::string("0.") + d.digits);
    if (d.exponent > 100000 || d.exponent < -100000)
        throw calc_error(errc::exponent_overflow, "value out of range for a plain real: '" + std::string(text) + "'");
    R v = m * pow10<R>(d.exponent);
    return d.negative ? R(-v) : v;
}

/// Scientific text `d.ddd e<exp>` rounded half-even to `digits` significant digits.
inline std::string to_text(const SignedScaled& v, int digits)
{
    if (digits < 1)
        throw calc_error(errc::domain_error, "digits must be >= 1");
    unsigned prec = std::max<unsigned>(v.mantissa().precision(), static_cast<unsigned>(digits) + 20);
    OracleReal scaled(v.mantissa(), prec);
    scaled *= OracleReal(pow10<BigInt>(digits));
    BigInt whole(floor(scaled));
    OracleReal frac = scaled - OracleReal(whole);
    if (frac > OracleReal(1) / 2 || (frac == OracleReal(1) / 2 && whole % 2 != 0))
        whole += 1;
    std::int64_t exponent = v.exponent() - 1;
    std::string s = whole.str();
    if (static_cast<int>(s.size()) > digits) {  // rounded up to 10^digits
        s.pop_back();
        ++exponent;
    }
    std::string out = v.negative() ? "-" : "";
    out += s[0];
    if (digits > 1) {
        out += '.';
        out += s.substr(1);
    }
    out += 'e';
    out += std::to_string(exponent);
    return out;
}

/// Plain real formatted with the same rules (zero prints as "0").
template <class R>
std::string real_to_text(const R& v, int digits)
{
    if (v == 0)
        return "0";
    return to_text(SignedScaled::from_real(v), digits);
}

namespace detail {

/// Mantissas equal when they agree to the working precision (or the coarser
/// operand, if lower). Exact comparison would split 0.1 parsed at 80 digits from
/// 0.1 produced by construction arithmetic.
inline int compare_mantissa(const SignedScaled& a, const SignedScaled& b)
{
    const OracleReal& ma = a.mantissa();
    const OracleReal& mb = b.mantissa();
    if (ma == mb)
        return 0;
    unsigned p = std::min({ma.precision(), mb.precision(), Real::default_precision()});
    precision_guard g(Real::default_precision(), std::max(ma.precision(), mb.precision()));
    OracleReal slack = pow(OracleReal(10), -static_cast<int>(p));
    if (abs(ma - mb) <= slack)
        return 0;
    return ma < mb ? -1 : 1;
}

}  // namespace detail

inline bool operator==(const SignedScaled& a, const SignedScaled& b)
{
    return a.sign() == b.sign() && a.exponent() == b.exponent() && detail::compare_mantissa(a, b) == 0;
}

/// Orders |a| against |b|: -1, 0 or +1.
inline int compare_abs(const SignedScaled& a, const SignedScaled& b)
{
    if (a.exponent() != b.exponent())
        return a.exponent() < b.exponent() ? -1 : 1;
    return detail::compare_mantissa(a, b);
}

/// |a - b| / |b| evaluated in oracle arithmetic; exponents are handled exactly.
inline OracleReal relative_difference(const SignedScaled& a, const SignedScaled& b)
{
    precision_guard g(Real::default_precision(), std::max(a.mantissa().precision(), b.mantissa().precision()));
    std::int64_t shift = a.exponent() - b.exponent();
    if (shift > 40 || shift < -40 || a.sign() != b.sign()) {
        if (a.sign() != b.sign())
            return OracleReal(2);
        return OracleReal(shift > 0 ? pow10<OracleReal>(std::min<std::int64_t>(shift, 40)) : OracleReal(1));
    }
    OracleReal av = a.mantissa() * pow10<OracleReal>(shift);
    return abs(av - b.mantissa()) / b.mantissa();
}

}  // namespace geocalc
