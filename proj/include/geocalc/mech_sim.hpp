#pragma once

// Telescopic-arm calculator: settings and readings snap to the graduation grid,
// results carry a worst-case half width.

#include "euler.hpp"
#include "exponent_solver.hpp"
#include "trace.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace geocalc {

struct MeasurementModel {
    Real resolution{"1e-5"};  // metres; vernier 0.01 mm
    Real arm_min{"0.01"};
    Real arm_max{2};
    int n_arms = 10;

    void validate() const
    {
        if (!(resolution > 0) || !(resolution < arm_min) || !(arm_min < arm_max))
            throw calc_error(errc::domain_error, "model needs 0 < resolution < arm_min < arm_max");
        if (n_arms < 1)
            throw calc_error(errc::domain_error, "model needs at least one perpendicular arm");
    }
};

/// Vernier, bench micrometer, light microscope, TEM; in metres.
inline constexpr std::array<const char*, 4> resolution_ladder{"1e-5", "5e-7", "2e-7", "1e-10"};

/// Nearest multiple of `step`, ties to even.
inline Real quantize(const Real& length, const Real& step)
{
    Real k = length / step;
    Real f = floor(k);
    Real d = k - f;
    if (d > Real(1) / 2 || (d == Real(1) / 2 && fmod(f, Real(2)) != 0))
        f += 1;
    return f * step;
}

/// Name of perpendicular arm i (1 = BD, 2 = DE, ...).
inline std::string arm_name(std::size_t i)
{
    std::string from = i == 1 ? std::string("B") : figure::foot_label(i - 1);
    return from + figure::foot_label(i);
}

struct DeviceState {
    Real cos_c;
    Real base_length;  // BC with the hypotenuse pushed onto A
    Real perp_ab;
    int n_arms = 10;
    std::vector<Real> arm_lengths;
    std::vector<bool> fastened;
    Real resolution;
};

namespace detail {

inline void check_arm(const std::string& name, const Real& length, const MeasurementModel& m)
{
    if (length < m.arm_min || length > m.arm_max)
        throw calc_error(errc::arm_out_of_range,
                         "arm " + name + " needs length " + to_text(SignedScaled::from_real(length), 6) + " outside [" +
                             real_to_text(m.arm_min, 4) + ", " + real_to_text(m.arm_max, 4) + "]");
}

/// Largest AB the main arms allow once the angle is fixed: AC = AB/sin C and BC = AB cot C.
inline Real ab_limit(const Real& c, const MeasurementModel& m)
{
    Real s = sqrt(1 - c * c);
    return m.arm_max * std::min(s, s / c);
}

/// Largest s with v 10^s <= limit.
inline std::int64_t fit_shift(const Real& v, const Real& limit)
{
    std::int64_t s = 0;
    Real x = v;
    while (x > limit) {
        x /= 10;
        --s;
    }
    while (x * 10 <= limit) {
        x *= 10;
        ++s;
    }
    return s;
}

struct span {
    Real lo, hi;
    Real width() const { return hi - lo; }
    span hull(const Real& v) const { return {std::min(lo, v), std::max(hi, v)}; }
    span hull(const span& o) const { return {std::min(lo, o.lo), std::max(hi, o.hi)}; }
};

/// Exact cosine num/den bracketed from the quantized settings of both arms.
inline span cosine_span(const Real& num_q, const Real& den_q, const Real& half, const Real& den_extra = 0)
{
    return {(num_q - half) / (den_q + half + den_extra), (num_q + half) / (den_q - half - den_extra)};
}

}  // namespace detail

/// Sets BC = cos C against AC = 1, then AB = P, and fits `depth` perpendiculars.
inline DeviceState assemble(const Real& cos_c, const Real& P, int depth, const MeasurementModel& model)
{
    model.validate();
    if (depth < 1)
        throw calc_error(errc::domain_error, "depth must be >= 1");
    if (depth > model.n_arms)
        throw calc_error(errc::depth_exceeded,
                         "depth " + std::to_string(depth) + " needs more than " + std::to_string(model.n_arms) + " arms");
    if (!(cos_c > 0) || !(cos_c < 1))
        throw calc_error(errc::degenerate_angle, "cos C must lie in (0, 1)");
    const Real& r = model.resolution;
    Real bc_set = quantize(cos_c, r), ac_set = quantize(Real(1), r);
    detail::check_arm("BC", bc_set, model);
    DeviceState st;
    st.cos_c = bc_set / ac_set;
    st.perp_ab = quantize(P, r);
    st.n_arms = model.n_arms;
    st.resolution = r;
    detail::check_arm("AB", st.perp_ab, model);
    Real s = sqrt(1 - st.cos_c * st.cos_c);
    detail::check_arm("AC", st.perp_ab / s, model);
    st.base_length = st.perp_ab * st.cos_c / s;
    detail::check_arm("BC", st.base_length, model);
    Real len = st.perp_ab;
    for (int i = 1; i <= depth; ++i) {
        len *= st.cos_c;
        detail::check_arm(arm_name(i), len, model);
        st.arm_lengths.push_back(len);
    }
    st.fastened.assign(st.arm_lengths.size(), true);
    return st;
}

/// Arm i read off its scale, to the nearest graduation.
inline Real read_length(const DeviceState& st, int arm)
{
    if (arm < 1 || arm > static_cast<int>(st.arm_lengths.size()))
        throw calc_error(errc::domain_error, "no arm " + std::to_string(arm) + " in this assembly");
    if (!st.fastened[arm - 1])
        throw calc_error(errc::not_fastened, "arm " + arm_name(arm) + " is not fastened");
    return quantize(st.arm_lengths[arm - 1], st.resolution);
}

struct Reading {
    std::string arm;
    Real length;
    Real exact;  // physical length before graduation
};

struct MeasuredResult {
    SignedScaled value = SignedScaled::from_real(Real(1));
    SignedScaled half_width = SignedScaled::from_real(Real(1));
    std::vector<Reading> readings;
};

namespace detail {

inline Real take_reading(std::vector<Reading>& log, const std::string& arm, const Real& exact, const Real& r)
{
    Real q = quantize(exact, r);
    log.push_back({arm, q, exact});
    return q;
}

inline SignedScaled scaled_value(int sign, const Real& v, std::int64_t exponent)
{
    SignedScaled out = SignedScaled::from_real(v, exponent);
    return sign < 0 ? -out : out;
}

/// Width as a positive scaled number (a width of zero only arises for exact settings).
inline SignedScaled scaled_width(const span& j, std::int64_t exponent, const Real& r)
{
    Real w = j.width();
    if (!(w > 0))
        w = r;
    return SignedScaled::from_real(w, exponent);
}

}  // namespace detail

/// x^n: cos C = mantissa of x; the deepest readable perpendicular is read, and when
/// n outruns the readable arms the reading becomes the next AB.
inline MeasuredResult simulate_power(const SignedScaled& x, int n, const MeasurementModel& model)
{
    model.validate();
    if (n < 1)
        throw calc_error(errc::domain_error, "power script needs n >= 1");
    if (n > model.n_arms)
        throw calc_error(errc::depth_exceeded,
                         "exponent " + std::to_string(n) + " exceeds " + std::to_string(model.n_arms) + " arms");
    const Real& r = model.resolution;
    Real half = r / 2;
    Real X = x.working_mantissa();
    Real bc = quantize(X, r), ac = quantize(Real(1), r);
    detail::check_arm("BC", bc, model);
    Real c = bc / ac;
    if (!(c < 1))
        throw calc_error(errc::degenerate_angle, "cos C rounds to 1 on this scale");
    detail::span C = detail::cosine_span(bc, ac, half);
    Real ab_max = detail::ab_limit(c, model);

    MeasuredResult out;
    detail::span J{1, 1};
    Real nominal = 1;  // exact running value in device units; drives the plan only
    Real current = 1;  // last reading, the next AB before shifting
    std::int64_t E = 0;
    int remaining = n;
    while (remaining > 0) {
        std::int64_t s = detail::fit_shift(nominal, ab_max);
        Real shift = pow10<Real>(s);
        Real ab_nominal = nominal * shift;
        Real ab = quantize(current * shift, r);
        detail::check_arm("AB", ab, model);
        E -= s;
        int j = 0;
        Real probe = ab_nominal;
        for (int i = 1; i <= remaining; ++i) {
            probe *= X;
            if (probe < model.arm_min)
                break;
            j = i;
        }
        if (j == 0)
            throw calc_error(errc::arm_out_of_range, "arm BD would be shorter than arm_min");
        Real p = ab * pow(c, j);
        detail::check_arm(arm_name(j), p, model);
        current = detail::take_reading(out.readings, arm_name(j), p, r);
        J = {(J.lo * shift - half) * pow(C.lo, j) - half, (J.hi * shift + half) * pow(C.hi, j) + half};
        nominal = ab_nominal * pow(X, j);
        remaining -= j;
    }
    int sign = (x.negative() && n % 2 == 1) ? -1 : 1;
    std::int64_t exp10 = exponent_add(E, exponent_mul(x.exponent(), n));
    out.value = detail::scaled_value(sign, current, exp10);
    out.half_width = detail::scaled_width(J, exp10, r);
    return out;
}

/// sqrt(ab): AB = larger mantissa, DE = smaller, read BD.
inline MeasuredResult simulate_gmean(const SignedScaled& a, const SignedScaled& b, const MeasurementModel& model)
{
    model.validate();
    if (a.sign() != b.sign())
        throw calc_error(errc::sign_mismatch, "geometric mean needs operands of one sign");
    const Real& r = model.resolution;
    Real half = r / 2;
    Real ma = a.working_mantissa(), mb = b.working_mantissa();
    std::int64_t ka = a.exponent(), kb = b.exponent();
    if (exponent_add(ka, kb) % 2 != 0) {
        if (ka <= kb) {
            ma /= 10;
            ++ka;
        } else {
            mb /= 10;
            ++kb;
        }
    }
    std::int64_t k = exponent_add(ka, kb) / 2;
    Real P = std::max(ma, mb), p2 = std::min(ma, mb);
    MeasuredResult out;
    if (P == p2) {
        Real ab = quantize(P, r);
        detail::check_arm("AB", ab, model);
        Real v = detail::take_reading(out.readings, "AB", ab, r);
        out.value = detail::scaled_value(a.sign(), v, k);
        out.half_width = detail::scaled_width(detail::span{P - half, P + half}.hull(v), k, r);
        return out;
    }
    Real c_nominal = sqrt(p2 / P);
    std::int64_t s = std::min<std::int64_t>(0, detail::fit_shift(P, detail::ab_limit(c_nominal, model)));
    Real shift = pow10<Real>(s);
    Real ab = quantize(P * shift, r), de = quantize(p2 * shift, r);
    detail::check_arm("AB", ab, model);
    detail::check_arm("DE", de, model);
    if (!(de < ab))
        throw calc_error(errc::degenerate_angle, "DE reaches AB on this scale");
    Real c = sqrt(de / ab);
    Real sn = sqrt(1 - c * c);
    detail::check_arm("AC", ab / sn, model);
    detail::check_arm("BC", ab * c / sn, model);
    Real bd = sqrt(ab * de);
    detail::check_arm("BD", bd, model);
    Real v = detail::take_reading(out.readings, "BD", bd, r);
    detail::span J{sqrt((P * shift - half) * (p2 * shift - half)) - half, sqrt((P * shift + half) * (p2 * shift + half)) + half};
    out.value = detail::scaled_value(a.sign(), v, k - s);
    out.half_width = detail::scaled_width(J, k - s, r);
    return out;
}

/// a/b: BC = 0.1 against AC = mantissa of b, AB = mantissa of a; BD = a'/(10 b').
inline MeasuredResult simulate_divide(const SignedScaled& a, const SignedScaled& b, const MeasurementModel& model)
{
    model.validate();
    const Real& r = model.resolution;
    Real half = r / 2;
    Real A = a.working_mantissa(), B = b.working_mantissa();
    int sign = a.sign() * b.sign();
    std::int64_t k = exponent_add(exponent_add(a.exponent(), -b.exponent()), 1);
    MeasuredResult out;
    if (b.is_power_of_ten()) {
        Real ab = quantize(A, r);
        detail::check_arm("AB", ab, model);
        Real v = detail::take_reading(out.readings, "AB", ab, r);
        // a / 10^(e-1) = 10 A 10^(ka - e)
        out.value = detail::scaled_value(sign, v, k);
        out.half_width = detail::scaled_width(detail::span{A - half, A + half}.hull(v), k, r);
        return out;
    }
    std::int64_t u = detail::fit_shift(B, model.arm_max);
    Real ushift = pow10<Real>(u);
    Real bc = quantize(Real("0.1") * ushift, r), ac = quantize(B * ushift, r);
    detail::check_arm("BC", bc, model);
    detail::check_arm("AC", ac, model);
    Real c = bc / ac;
    if (!(c < 1))
        throw calc_error(errc::degenerate_angle, "cos C rounds to 1 on this scale");
    detail::span C = detail::cosine_span(bc, ac, half);
    Real c_nominal = Real("0.1") / B;
    std::int64_t s = detail::fit_shift(A, detail::ab_limit(c_nominal, model));
    Real shift = pow10<Real>(s);
    Real ab = quantize(A * shift, r);
    detail::check_arm("AB", ab, model);
    Real sn = sqrt(1 - c * c);
    detail::check_arm("AC", ab / sn, model);
    detail::check_arm("BC", ab * c / sn, model);
    Real bd = ab * c;
    detail::check_arm("BD", bd, model);
    Real v = detail::take_reading(out.readings, "BD", bd, r);
    detail::span J{(A * shift - half) * C.lo - half, (A * shift + half) * C.hi + half};
    out.value = detail::scaled_value(sign, v, k - s);
    out.half_width = detail::scaled_width(J, k - s, r);
    return out;
}

namespace detail {

struct search_outcome {
    Real cos_set;  // BC against AC = 1, on the grid
    span bound;    // holds both cos_set and the exact root
    int trials = 0;
};

/// Turns BC (AC = 1) until the n-th perpendicular reads the target length T.
/// Bisection over graduations; stops when the bracket is one graduation wide.
inline search_outcome search_by_readings(const Real& target, int n, const MeasurementModel& model,
                                         std::vector<Reading>& log)
{
    const Real& r = model.resolution;
    Real half = r / 2;
    Real T = quantize(target, r);
    check_arm("target", T, model);
    std::int64_t lo = static_cast<std::int64_t>(ceil(model.arm_min / r).convert_to<double>());
    std::int64_t hi = static_cast<std::int64_t>(floor(Real(1) / r + Real(1) / 2).convert_to<double>()) - 1;
    auto scale_for = [&](const Real& c) { return fit_shift(Real(1), ab_limit(c, model)); };
    search_outcome out;
    // reading at or above T
    auto reaches = [&](std::int64_t count) {
        Real c = Real(count) * r;
        std::int64_t t = std::min<std::int64_t>(0, scale_for(c));
        Real ab = quantize(pow10<Real>(t), r);
        Real p = ab * pow(c, n);
        ++out.trials;
        if (p < model.arm_min) {
            if (t < 0)
                throw calc_error(errc::arm_out_of_range, "arm " + arm_name(n) + " too short to read near cos C = 1");
            return false;
        }
        Real v = take_reading(log, arm_name(n), p, r);
        return v * pow10<Real>(-t) >= T;
    };
    int iterations = 0;
    while (hi - lo > 1) {
        if (++iterations > 200)
            throw calc_error(errc::no_convergence, "bracket did not close");
        std::int64_t mid = lo + (hi - lo) / 2;
        if (reaches(mid))
            hi = mid;
        else
            lo = mid;
    }
    out.cos_set = Real(hi) * r;
    Real inv = Real(1) / n;
    Real S = pow10<Real>(-std::min<std::int64_t>(0, scale_for(out.cos_set)));
    Real eps = half + half * S;
    span exact{pow(std::max(T - half, Real(0)), inv), pow(T + half, inv)};
    span reached{pow(std::max(T - half - eps, Real(0)), inv), pow(T + half + eps, inv) + r};
    out.bound = exact.hull(reached).hull(out.cos_set);
    return out;
}

}  // namespace detail

/// x^(1/n): cos C with p_n = mantissa found by turning the angle, a second search
/// for 10^(-1/n), then AB = first root against the second angle reads the product.
inline MeasuredResult simulate_root(const SignedScaled& x, int n, const MeasurementModel& model)
{
    model.validate();
    if (n < 1)
        throw calc_error(errc::domain_error, "root script needs n >= 1");
    if (n > model.n_arms)
        throw calc_error(errc::depth_exceeded, "root index " + std::to_string(n) + " exceeds " +
                                                   std::to_string(model.n_arms) + " arms");
    if (x.negative() && n % 2 == 0)
        throw calc_error(errc::even_root_of_negative, "even root of a negative number");
    const Real& r = model.resolution;
    Real half = r / 2;
    // x = M 10^e, e = n k - s with 0 <= s < n
    std::int64_t k = ceil_div(x.exponent(), n);
    std::int64_t s = k * n - x.exponent();
    MeasuredResult out;
    auto first = detail::search_by_readings(x.working_mantissa(), n, model, out.readings);
    out.readings.push_back({"BC", first.cos_set, first.cos_set});
    if (s == 0) {
        out.value = detail::scaled_value(x.sign(), first.cos_set, k);
        out.half_width = detail::scaled_width(first.bound, k, r);
        return out;
    }
    auto second = detail::search_by_readings(Real("0.1"), n, model, out.readings);
    Real c = second.cos_set;
    std::int64_t t = std::min<std::int64_t>(0, detail::fit_shift(first.cos_set, detail::ab_limit(c, model)));
    Real shift = pow10<Real>(t);
    Real ab = quantize(first.cos_set * shift, r);
    detail::check_arm("AB", ab, model);
    Real p = ab * pow(c, static_cast<int>(s));
    detail::check_arm(arm_name(static_cast<std::size_t>(s)), p, model);
    Real v = detail::take_reading(out.readings, arm_name(static_cast<std::size_t>(s)), p, r);
    int si = static_cast<int>(s);
    detail::span J{(first.bound.lo * shift - half) * pow(second.bound.lo, si) - half,
                   (first.bound.hi * shift + half) * pow(second.bound.hi, si) + half};
    out.value = detail::scaled_value(x.sign(), v, k - t);
    out.half_width = detail::scaled_width(J, k - t, r);
    return out;
}

struct MeasuredRatio {
    MeasuredResult result;
    ContinuedFraction p;  // (1/e)^p = 1/a
    ContinuedFraction q;  // (1/e)^q = 1/x
};

namespace detail {

struct cf_level_run {
    ContinuedFraction cf;
    span value;  // exact log ratio
    Real estimate;
};

/// One side of the change-of-base script: CB = 1 against AC = e, target 1/a.
inline cf_level_run measure_log(const Real& target_value, const Real& e_value, const Real& e_error, int max_depth,
                                const MeasurementModel& model, std::vector<Reading>& readings)
{
    const Real& r = model.resolution;
    Real half = r / 2;

    // the target length, set near the top of its decade
    std::int64_t tu = fit_shift(target_value, Real(1));
    if (target_value * pow10<Real>(tu) == 1)
        --tu;
    Real tq = quantize(target_value * pow10<Real>(tu), r);
    check_arm("target", tq, model);
    Real tscale = pow10<Real>(-tu);
    span t_exact{(tq - half) * tscale, (tq + half) * tscale};
    Real t_dev = tq * tscale;

    // base 1/e from CB and AC
    std::int64_t u0 = fit_shift(e_value, model.arm_max);
    Real u0s = pow10<Real>(u0);
    Real cb = quantize(u0s, r), ac = quantize(e_value * u0s, r);
    span b_exact = cosine_span(cb, ac, half, e_error * u0s);
    Real num = cb, den = ac;

    cf_level_run run;
    std::vector<span> bases{b_exact}, targets{t_exact};
    std::int64_t total_cap = 100000;
    for (int level = 0; level < max_depth; ++level) {
        // cosine from two lengths, both shifted to fit
        std::int64_t u = fit_shift(den, model.arm_max);
        Real us = pow10<Real>(u);
        Real bc_set = quantize(num * us, r), ac_set = quantize(den * us, r);
        if (bc_set < model.arm_min || !(bc_set < ac_set))
            break;
        Real c = bc_set / ac_set;
        std::int64_t t = std::min<std::int64_t>(0, fit_shift(Real(1), ab_limit(c, model)));
        Real ab = quantize(pow10<Real>(t), r);
        if (ab < model.arm_min)
            break;
        Real F = pow10<Real>(-t);  // device length times F is the value
        Real base_read = 0;        // value of p_1
        Real last_value = 1;
        Real last_grid = r * F;
        std::int64_t N = 0;
        bool crossed = false, stuck = false;
        Real ab_cur = ab;
        while (!crossed) {
            int last_j = 0;
            Real last_read = 0;
            for (int j = 1; j <= model.n_arms; ++j) {
                Real p = ab_cur * pow(c, j);
                if (p < model.arm_min)
                    break;
                Real q = take_reading(readings, arm_name(static_cast<std::size_t>(j)), p, r);
                Real v = q * F;
                if (N == 0 && j == 1)
                    base_read = v;
                if (v < t_dev) {
                    crossed = true;
                    break;
                }
                last_j = j;
                last_read = q;
                last_value = v;
                last_grid = r * F;
            }
            N += last_j;
            if (crossed)
                break;
            if (last_j == 0 || N > total_cap) {
                stuck = true;
                break;
            }
            // the last reading becomes AB for the next assembly
            std::int64_t sh = fit_shift(last_read, ab_limit(c, model));
            ab_cur = quantize(last_read * pow10<Real>(sh), r);
            F = F * pow10<Real>(-sh);
            if (ab_cur < model.arm_min) {
                stuck = true;
                break;
            }
        }
        if (stuck)
            break;
        if (level > 0 && N == 0)
            break;
        run.cf.terms.emplace_back(N);
        span b = bases.back(), tt = targets.back();
        Real bn_lo = pow(b.lo, static_cast<int>(N)), bn_hi = pow(b.hi, static_cast<int>(N));
        bases.push_back({tt.lo / bn_hi, tt.hi / bn_lo});
        targets.push_back(b);
        if (last_value - t_dev <= last_grid) {
            run.cf.terminated = true;
            break;
        }
        // residual t / b^N becomes the next cosine, the old base the next target
        num = t_dev;
        den = last_value;
        if (base_read == 0)
            break;
        t_dev = base_read;
    }
    if (run.cf.terms.empty())
        throw calc_error(errc::arm_out_of_range, "no perpendicular could be compared with the target");

    // The exact log equals [N_0; ..., N_{K-1}, x_K] for any integers chosen, with
    // 1/x_K = ln b_K / ln t_K. Every truncation depth gives an enclosure; keep
    // their intersection.
    std::optional<span> enclosure;
    for (std::size_t K = 1; K <= run.cf.terms.size(); ++K) {
        span bK = bases[K], tK = targets[K];
        if (!(tK.hi < 1) || !(tK.lo > 0) || !(bK.lo > 0))
            continue;
        Real lb[2] = {log(bK.lo), log(bK.hi)}, lt[2] = {log(tK.lo), log(tK.hi)};
        Real ylo = lb[0] / lt[0], yhi = ylo;
        for (auto& num_log : lb)
            for (auto& den_log : lt) {
                ylo = std::min(ylo, Real(num_log / den_log));
                yhi = std::max(yhi, Real(num_log / den_log));
            }
        span v{Real(run.cf.terms[K - 1]) + ylo, Real(run.cf.terms[K - 1]) + yhi};
        bool ok = true;
        for (std::size_t i = K - 1; i-- > 0;) {
            if (v.lo <= 0 && v.hi >= 0) {
                ok = false;
                break;
            }
            v = {Real(run.cf.terms[i]) + 1 / v.hi, Real(run.cf.terms[i]) + 1 / v.lo};
        }
        if (!ok)
            continue;
        enclosure = enclosure ? span{std::max(enclosure->lo, v.lo), std::min(enclosure->hi, v.hi)} : v;
    }
    if (!enclosure)
        throw calc_error(errc::no_convergence, "resolution too coarse to bound the logarithm");
    span v = *enclosure;
    run.value = v;
    Rational est = evaluate_cf(run.cf);
    run.estimate = Real(est.numerator) / Real(est.denominator);
    return run;
}

}  // namespace detail

/// m/n in x^(m/n) = a as p/q with (1/e)^p = 1/a and (1/e)^q = 1/x.
inline MeasuredRatio simulate_cf_recover(const SignedScaled& x, const SignedScaled& a, const MeasurementModel& model,
                                         int max_depth = 8)
{
    model.validate();
    if (x.negative() || a.negative())
        throw calc_error(errc::domain_error, "change of base needs positive x and a");
    SignedScaled one = SignedScaled::from_real(Real(1));
    int cx = compare_abs(x, one), ca = compare_abs(a, one);
    if (cx == 0 || ca == 0)
        throw calc_error(errc::domain_error, "x and a must differ from 1");
    if (cx != ca)
        throw calc_error(errc::domain_error, "exponent would be negative");
    if (max_depth < 1)
        throw calc_error(errc::domain_error, "depth must be >= 1");
    Real e_value = cached_euler_e();
    Real e_error = Real(euler_reference_digits) / (2 * Real(cached_euler_steps));
    auto target = [&](const SignedScaled& v) { return cx > 0 ? Real(1 / v.to<Real>()) : v.to<Real>(); };
    MeasuredRatio out;
    auto p = detail::measure_log(target(a), e_value, e_error, max_depth, model, out.result.readings);
    auto q = detail::measure_log(target(x), e_value, e_error, max_depth, model, out.result.readings);
    out.p = p.cf;
    out.q = q.cf;
    if (!(q.value.lo > 0) || !(q.estimate > 0))
        throw calc_error(errc::no_convergence, "denominator logarithm not bounded away from zero");
    // Report the middle of the enclosure. The ratio of the two truncated fractions
    // carries a truncation error that depends on which terms the readings gave.
    detail::span J{p.value.lo / q.value.hi, p.value.hi / q.value.lo};
    Real ratio = (J.lo + J.hi) / 2;
    out.result.value = SignedScaled::from_real(ratio);
    out.result.half_width = detail::scaled_width(J, 0, model.resolution);
    return out;
}

// Script files: one operation per line, '#' starts a comment.
//   power X N | gmean A B | divide A B | root X N | cf-recover X A
// followed by optional key=value settings: resolution, arm_min, arm_max, arms, depth.
// A line "model key=value ..." changes the defaults for the lines after it.

struct ScriptCommand {
    std::string op;
    std::vector<std::string> args;
    MeasurementModel model;
    int depth = 8;  // cf-recover only
    int line = 0;
};

struct ScriptRecord {
    ScriptCommand command;
    MeasuredResult result;
    std::optional<ContinuedFraction> p, q;  // cf-recover
};

namespace detail {

inline int script_int(const std::string& text, int line)
{
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || used == 0 || v < INT32_MIN || v > INT32_MAX)
        throw calc_error(errc::parse_error, "line " + std::to_string(line) + ": expected an integer, got '" + text + "'");
    return static_cast<int>(v);
}

inline void apply_setting(ScriptCommand& c, const std::string& key, const std::string& value)
{
    auto real = [&] {
        parse_decimal(value);  // grammar check
        return Real(value);
    };
    if (key == "resolution")
        c.model.resolution = real();
    else if (key == "arm_min")
        c.model.arm_min = real();
    else if (key == "arm_max")
        c.model.arm_max = real();
    else if (key == "arms")
        c.model.n_arms = script_int(value, c.line);
    else if (key == "depth")
        c.depth = script_int(value, c.line);
    else
        throw calc_error(errc::parse_error, "line " + std::to_string(c.line) + ": unknown setting '" + key + "'");
}

}  // namespace detail

inline std::vector<ScriptCommand> parse_script(std::string_view text, const MeasurementModel& defaults = {})
{
    std::vector<ScriptCommand> out;
    ScriptCommand base;
    base.model = defaults;
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        std::istringstream ls(raw);
        std::vector<std::string> words;
        for (std::string w; ls >> w;)
            words.push_back(w);
        if (words.empty())
            continue;
        ScriptCommand c = base;
        c.line = lineno;
        c.op = words[0];
        for (std::size_t i = 1; i < words.size(); ++i) {
            auto eq = words[i].find('=');
            if (eq == std::string::npos)
                c.args.push_back(words[i]);
            else
                detail::apply_setting(c, words[i].substr(0, eq), words[i].substr(eq + 1));
        }
        auto where = "line " + std::to_string(lineno) + ": ";
        if (c.op == "model") {
            if (!c.args.empty())
                throw calc_error(errc::parse_error, where + "model takes only key=value settings");
            c.model.validate();
            base.model = c.model;
            base.depth = c.depth;
            continue;
        }
        static const std::array<const char*, 5> ops{"power", "gmean", "divide", "root", "cf-recover"};
        if (std::find(ops.begin(), ops.end(), c.op) == ops.end())
            throw calc_error(errc::parse_error, where + "unknown operation '" + c.op + "'");
        if (c.args.size() != 2)
            throw calc_error(errc::parse_error, where + c.op + " takes two operands");
        normalize(c.args[0]);
        if (c.op == "power" || c.op == "root")
            detail::script_int(c.args[1], lineno);
        else
            normalize(c.args[1]);
        out.push_back(std::move(c));
    }
    return out;
}

inline ScriptRecord run_script(const ScriptCommand& c)
{
    ScriptRecord rec{c, {}, std::nullopt, std::nullopt};
    auto x = normalize(c.args[0]);
    if (c.op == "power")
        rec.result = simulate_power(x, detail::script_int(c.args[1], c.line), c.model);
    else if (c.op == "root")
        rec.result = simulate_root(x, detail::script_int(c.args[1], c.line), c.model);
    else if (c.op == "gmean")
        rec.result = simulate_gmean(x, normalize(c.args[1]), c.model);
    else if (c.op == "divide")
        rec.result = simulate_divide(x, normalize(c.args[1]), c.model);
    else if (c.op == "cf-recover") {
        auto r = simulate_cf_recover(x, normalize(c.args[1]), c.model, c.depth);
        rec.result = std::move(r.result);
        rec.p = std::move(r.p);
        rec.q = std::move(r.q);
    } else
        throw calc_error(errc::parse_error, "unknown operation '" + c.op + "'");
    return rec;
}

}  // namespace geocalc
