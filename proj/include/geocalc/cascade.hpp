#pragma once

// Perpendicular cascade inside a right triangle ABC (right angle at B):
// p_i = AB * cos^i C, and the operations built directly on it.

#include "numeric_core.hpp"
#include "oracle.hpp"
#include "trace.hpp"

#include <vector>

namespace geocalc {

enum class backend { construction, oracle };

struct EngineConfig {
    PrecisionPolicy precision{};
    backend mode = backend::construction;
    /// Largest |n| accepted by power().
    std::int64_t max_power = 1'000'000;
    /// Above this depth the cascade is evaluated by repeated squaring.
    std::int64_t literal_depth = 10'000;
    /// Receives the construction steps when mode == construction.
    GeometricPrimitiveTrace* trace = nullptr;

    GeometricPrimitiveTrace* sink() const { return mode == backend::construction ? trace : nullptr; }
};

struct Construction {
    Real cos_c;
    Real perpendicular;  // AB
    std::int64_t depth = 1;
    backend mode = backend::construction;
};

struct Cascade {
    std::vector<Real> lengths;  // p_1 .. p_depth
};

enum class reciprocal_method { angle, unit_perpendicular };
enum class gmean_method { bisect, rotate };
enum class divide_method { hypotenuse, similar_triangles };

namespace detail {

inline double to_double(const Real& v) { return v.convert_to<double>(); }

inline std::string trace_value(const Real& v) { return real_to_text(v, 12); }

inline void check_cosine(const Real& c)
{
    if (c <= 0 || c >= 1)
        throw calc_error(errc::degenerate_angle, "cos C must lie strictly between 0 and 1, got " + c.str(12));
}

/// Length of the n-th perpendicular, P * cos^n C. Deep cascades are walked
/// virtually by squaring, which gives the same number with fewer roundings.
inline Real cascade_length(const Real& cos_c, const Real& P, std::int64_t n, std::int64_t literal_depth)
{
    if (n <= literal_depth) {
        Real p = P;
        for (std::int64_t i = 0; i < n; ++i)
            p *= cos_c;
        return p;
    }
    Real result = 1;
    Real base = cos_c;
    auto k = static_cast<std::uint64_t>(n);
    while (k) {
        if (k & 1u)
            result *= base;
        k >>= 1;
        if (k)
            base *= base;
    }
    return P * result;
}

inline SignedScaled scaled(int sign, const Real& magnitude, std::int64_t exponent)
{
    return SignedScaled::from_real(Real(sign * magnitude), exponent);
}

/// Mantissa rewritten into (1, 10] so its reciprocal is a usable cosine.
/// Returns (X', k') with |x| = X' * 10^k'.
inline std::pair<Real, std::int64_t> upper_decade(const SignedScaled& x)
{
    Real m = x.working_mantissa() * 10;
    std::int64_t k = x.exponent() - 1;
    if (x.is_power_of_ten()) {  // mantissa 0.1 would give cos C = 1
        m = 10;
        k -= 1;
    }
    return {m, k};
}

/// x^n for n >= 1 without the public size cap.
inline SignedScaled power_positive(const SignedScaled& x, std::int64_t n, const EngineConfig& cfg,
                                   const std::string& suffix = "")
{
    Real X = x.working_mantissa();
    Real pn = cascade_length(X, Real(1), n, cfg.literal_depth);
    int sign = (x.negative() && n % 2 != 0) ? -1 : 1;
    if (auto* t = cfg.sink())
        figure::emit_cascade(*t, to_double(X), 1.0, n, trace_value(pn), suffix);
    return scaled(sign, pn, exponent_mul(x.exponent(), n));
}

/// x^-n for n >= 1: (1/X')^n * 10^(-k' n).
inline SignedScaled power_negative(const SignedScaled& x, std::int64_t n, const EngineConfig& cfg,
                                   const std::string& suffix = "")
{
    auto [Xp, kp] = upper_decade(x);
    Real cos_c = 1 / Xp;
    Real pn = cascade_length(cos_c, Real(1), n, cfg.literal_depth);
    int sign = (x.negative() && n % 2 != 0) ? -1 : 1;
    if (auto* t = cfg.sink())
        figure::emit_cascade(*t, to_double(cos_c), 1.0, n, trace_value(pn), suffix);
    return scaled(sign, pn, exponent_mul(-kp, n));
}

inline SignedScaled power_any(const SignedScaled& x, std::int64_t n, const EngineConfig& cfg, const std::string& suffix = "")
{
    if (n == 0)
        throw calc_error(errc::domain_error, "exponent must be nonzero");
    precision_guard g(cfg.precision);
    if (cfg.mode == backend::oracle)
        return oracle::pow(x, n, cfg.precision);
    return n > 0 ? power_positive(x, n, cfg, suffix) : power_negative(x, -n, cfg, suffix);
}

/// Rotating hypotenuse about D (E fixed on the base, DE = p2) until AB = P.
struct rotate_state {
    vec2 c, e, d, b, a;
};

inline rotate_state rotate_geometry(double cos_c, double p2)
{
    double sin_c = std::sqrt(1 - cos_c * cos_c);
    double tan_c = sin_c / cos_c;
    rotate_state s;
    s.e = {1, 0};
    s.d = {1, p2};
    s.c = {1 - p2 / tan_c, 0};
    double cb = (p2 / sin_c) / cos_c;
    s.b = s.c + vec2{cb, 0};
    s.a = {s.b.x, cb * tan_c};
    return s;
}

}  // namespace detail

/// Lengths p_1..p_depth of the cascade described by `c`.
inline Cascade build_cascade(const Construction& c, const EngineConfig& cfg = {})
{
    precision_guard g(cfg.precision);
    detail::check_cosine(c.cos_c);
    if (c.perpendicular <= 0)
        throw calc_error(errc::domain_error, "perpendicular AB must be positive");
    if (c.depth < 1)
        throw calc_error(errc::domain_error, "cascade depth must be >= 1");
    if (c.depth > cfg.max_power)
        throw calc_error(errc::domain_error, "cascade depth exceeds configured maximum");
    Cascade out;
    out.lengths.reserve(static_cast<std::size_t>(c.depth));
    if (c.mode == backend::oracle) {
        OracleReal oc(c.cos_c), op(c.perpendicular);
        for (std::int64_t i = 1; i <= c.depth; ++i)
            out.lengths.emplace_back(OracleReal(op * pow(oc, OracleReal(i))));
        return out;
    }
    Real p = c.perpendicular;
    for (std::int64_t i = 1; i <= c.depth; ++i) {
        p *= c.cos_c;
        out.lengths.push_back(p);
    }
    if (cfg.trace)
        figure::emit_cascade(*cfg.trace, detail::to_double(c.cos_c), detail::to_double(c.perpendicular), c.depth,
                             detail::trace_value(out.lengths.back()));
    return out;
}

/// x^n for nonzero n with |n| <= cfg.max_power.
inline SignedScaled power(const SignedScaled& x, std::int64_t n, const EngineConfig& cfg = {})
{
    if (n > cfg.max_power || n < -cfg.max_power)
        throw calc_error(errc::domain_error, "|n| exceeds configured maximum " + std::to_string(cfg.max_power));
    return detail::power_any(x, n, cfg);
}

inline SignedScaled reciprocal(const SignedScaled& x, reciprocal_method method = reciprocal_method::angle,
                               const EngineConfig& cfg = {})
{
    precision_guard g(cfg.precision);
    if (cfg.mode == backend::oracle)
        return oracle::recip(x, cfg.precision);
    if (method == reciprocal_method::angle) {
        // cos C = 1/X' with AB = 1, so BD = 1/X'
        auto [Xp, kp] = detail::upper_decade(x);
        Real cos_c = 1 / Xp;
        Real bd = Real(1) * cos_c;
        if (auto* t = cfg.sink())
            figure::emit_cascade(*t, detail::to_double(cos_c), 1.0, 1, detail::trace_value(bd));
        return detail::scaled(x.sign(), bd, -kp);
    }
    // BD = 1 and DE = X fix cos C = X; the hypotenuse then meets the
    // perpendicular raised at B at height AB = BD / cos C = 1/X.
    Real X = x.working_mantissa();
    Real bd = 1;
    Real cos_c = X / bd;
    Real ab = bd / cos_c;
    if (auto* t = cfg.sink()) {
        figure::emit_cascade(*t, detail::to_double(cos_c), detail::to_double(ab), 2, detail::trace_value(X));
        t->add({primitive::measure_length, {figure::ref("A"), figure::ref("B")}, {{"value", detail::trace_value(ab)}}});
    }
    return detail::scaled(x.sign(), ab, -x.exponent());
}

inline SignedScaled geometric_mean(const SignedScaled& a, const SignedScaled& b, gmean_method method = gmean_method::bisect,
                                   const EngineConfig& cfg = {})
{
    precision_guard g(cfg.precision);
    if (a.sign() != b.sign())
        throw calc_error(errc::sign_mismatch, "geometric mean needs operands of one sign");
    if (cfg.mode == backend::oracle)
        return oracle::gmean(a, b, cfg.precision);

    Real ma = a.working_mantissa(), mb = b.working_mantissa();
    std::int64_t ka = a.exponent(), kb = b.exponent();
    std::int64_t ksum = exponent_add(ka, kb);
    if (ksum % 2 != 0) {
        // Parity repair: the operand with the smaller exponent moves into [0.01, 0.1).
        if (ka <= kb)
            ma /= 10;
        else
            mb /= 10;
        ksum = exponent_add(ksum, 1);
    }
    std::int64_t khalf = ksum / 2;
    Real P = std::max(ma, mb);
    Real p2 = std::min(ma, mb);
    if (P == p2)
        return detail::scaled(a.sign(), P, khalf);

    Real bd;
    auto* t = cfg.sink();
    if (method == gmean_method::bisect) {
        Real cos2c = (2 * p2 - P) / P;
        Real two_c = acos(cos2c);
        Real c_angle = two_c / 2;
        Real cos_c = cos(c_angle);
        bd = P * cos_c;
        if (t) {
            using figure::def;
            using figure::ref;
            double L = detail::to_double(P) * 1.15;
            double th2 = detail::to_double(two_c), th = detail::to_double(c_angle);
            double dP = detail::to_double(P), dp2 = detail::to_double(p2);
            vec2 C{0, 0}, X{L, 0}, Y{L * std::cos(th2), L * std::sin(th2)}, Yp{L * std::cos(th), L * std::sin(th)};
            vec2 D{dp2 / std::tan(th), dp2}, E{dp2 / std::tan(th), 0};
            // B sits where the perpendicular from D meets CX; then AB = P
            double cb = dp2 / (std::sin(th) * std::cos(th));
            vec2 B{cb, 0}, A{cb, cb * std::tan(th)};
            t->add({primitive::construct_angle_from_cosine, {def("C", C), def("X", X), def("Y", Y)},
                    {{"cos", figure::num(detail::to_double(cos2c))}}});
            t->add({primitive::bisect_angle, {ref("C"), ref("X"), ref("Y"), def("Y'", Yp)}, {}});
            t->add({primitive::drop_perpendicular, {def("D", D), def("E", E), ref("C"), ref("X")}, {{"length", figure::num(dp2)}}});
            t->add({primitive::drop_perpendicular, {def("B", B), ref("D"), ref("C"), ref("Y'")}, {}});
            t->add({primitive::drop_perpendicular, {def("A", A), ref("B"), ref("C"), ref("X")}, {{"length", figure::num(dP)}}});
            t->add({primitive::measure_length, {ref("B"), ref("D")}, {{"value", detail::trace_value(bd)}}});
        }
    } else {
        // AB(c) = p2 / c^2 falls as c grows; bisect until AB matches P.
        Real tol = cfg.precision.rel_tol();
        Real lo = 0, hi = 1, c = Real(1) / 2;
        std::vector<double> tried;
        for (int it = 0; it < 200; ++it) {
            c = (lo + hi) / 2;
            Real ab = p2 / (c * c);
            if (tried.size() < 6)
                tried.push_back(detail::to_double(c));
            if (abs(ab - P) <= tol * P)
                break;
            if (ab > P)
                lo = c;
            else
                hi = c;
            if (hi - lo < tol * hi)
                break;
        }
        bd = p2 / c;
        if (t) {
            using figure::def;
            using figure::ref;
            double dp2 = detail::to_double(p2);
            auto s0 = detail::rotate_geometry(0.5, dp2);
            t->add({primitive::construct_angle_from_cosine, {def("C", s0.c), def("E", s0.e), def("D", s0.d)}, {{"cos", "0.5"}}});
            t->add({primitive::drop_perpendicular, {def("B", s0.b), ref("D"), ref("C"), ref("D")}, {}});
            t->add({primitive::drop_perpendicular, {def("A", s0.a), ref("B"), ref("C"), ref("E")}, {}});
            for (std::size_t i = 1; i < tried.size(); ++i) {
                auto s = detail::rotate_geometry(tried[i], dp2);
                t->add({primitive::rotate_hypotenuse, {ref("D"), def("Cr", s.c), def("Ar", s.a)},
                        {{"cos", figure::num(tried[i])}, {"measured", figure::num(dp2 / (tried[i] * tried[i]))}}});
            }
            double cf = detail::to_double(c);
            auto s = detail::rotate_geometry(cf, dp2);
            t->add({primitive::rotate_hypotenuse, {ref("D"), def("C1", s.c), def("A1", s.a)},
                    {{"cos", figure::num(cf)}, {"measured", figure::num(dp2 / (cf * cf))}}});
            t->add({primitive::drop_perpendicular, {def("B1", s.b), ref("D"), ref("C1"), ref("A1")}, {}});
            t->add({primitive::drop_perpendicular, {ref("A1"), ref("B1"), ref("C1"), ref("E")}, {}});
            t->add({primitive::measure_length, {ref("B1"), ref("D")}, {{"value", detail::trace_value(bd)}}});
        }
    }
    return detail::scaled(a.sign(), bd, khalf);
}

/// a*b as the square of the geometric mean of |a| and |b|.
inline SignedScaled multiply(const SignedScaled& a, const SignedScaled& b, const EngineConfig& cfg = {})
{
    precision_guard g(cfg.precision);
    if (cfg.mode == backend::oracle)
        return oracle::mul(a, b, cfg.precision);
    SignedScaled gm = geometric_mean(a.abs(), b.abs(), gmean_method::bisect, cfg);
    SignedScaled sq = detail::power_positive(gm, 2, cfg, "'");
    return a.sign() * b.sign() < 0 ? -sq : sq;
}

inline SignedScaled divide(const SignedScaled& num, const SignedScaled& den, divide_method method = divide_method::hypotenuse,
                           const EngineConfig& cfg = {})
{
    precision_guard g(cfg.precision);
    if (cfg.mode == backend::oracle)
        return oracle::div(num, den, cfg.precision);
    int sign = num.sign() * den.sign();
    auto* t = cfg.sink();
    if (method == divide_method::hypotenuse) {
        // AB = numerator mantissa, cos C = 1/den', BD = AB cos C
        Real ab = num.working_mantissa();
        auto [dp, kd] = detail::upper_decade(den);
        Real cos_c = 1 / dp;
        Real bd = ab * cos_c;
        if (t)
            figure::emit_cascade(*t, detail::to_double(cos_c), detail::to_double(ab), 1, detail::trace_value(bd));
        return detail::scaled(sign, bd, exponent_add(num.exponent(), -kd));
    }
    // Base BC = 1, AB = P; the perpendicular XY = p cuts off CX = p/P.
    Real P = den.working_mantissa();
    Real p = num.working_mantissa();
    std::int64_t kp = num.exponent();
    if (p >= P) {
        p /= 10;
        kp = exponent_add(kp, 1);
    }
    Real bc = 1;
    Real cx = bc * p / P;
    if (t) {
        using figure::def;
        using figure::ref;
        double dP = detail::to_double(P), dcx = detail::to_double(cx);
        t->add({primitive::construct_angle_from_cosine, {def("C", {0, 0}), def("B", {1, 0}), def("A", {1, dP})},
                {{"cos", figure::num(1 / std::hypot(1.0, dP))}}});
        t->add({primitive::drop_perpendicular,
                {def("Y", {dcx, dcx * dP}), def("X", {dcx, 0}), ref("C"), ref("B")},
                {{"length", figure::num(detail::to_double(p))}}});
        t->add({primitive::measure_length, {ref("C"), ref("X")}, {{"value", detail::trace_value(cx)}}});
    }
    return detail::scaled(sign, cx, exponent_add(kp, -den.exponent()));
}

}  // namespace geocalc
