#pragma once

// Randomized mechanical scripts checked against the oracle; shared by the unit
// suite and the acceptance runner.

#include <geocalc/mech_sim.hpp>
#include <geocalc/oracle.hpp>

#include <random>
#include <string>

namespace geocalc::testing {

enum class script_kind { power, gmean, divide, root, cf_recover };

struct script_case {
    script_kind kind;
    SignedScaled x = SignedScaled::from_real(Real(1));
    SignedScaled y = SignedScaled::from_real(Real(1));
    int n = 0;
};

struct script_check {
    bool ran = false;         // false when the device refused (arm limits)
    bool readings_ok = true;  // every reading within resolution/2
    bool bound_ok = true;     // |value - exact| <= half_width
    OracleReal half_width = 0;
    std::string failure;
};

inline SignedScaled random_number(std::mt19937_64& rng, int min_exp, int max_exp, bool allow_negative)
{
    std::uniform_real_distribution<double> mant(0.1, 1.0);
    std::uniform_int_distribution<int> ex(min_exp, max_exp);
    double m = mant(rng);
    auto v = SignedScaled::from_real(OracleReal(m), ex(rng));
    if (allow_negative && (rng() & 1u))
        v = -v;
    return v;
}

/// Mix used by the soundness runs: cf-recover is a small share because each run
/// takes many assemblies.
inline script_case random_script(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> pick(0, 99), nn(1, 10);
    int k = pick(rng);
    if (k < 26)
        return {script_kind::power, random_number(rng, -30, 30, true), SignedScaled::from_real(Real(1)), nn(rng)};
    if (k < 50) {
        auto a = random_number(rng, -30, 30, false);
        auto b = random_number(rng, -30, 30, false);
        if (rng() & 1u) {
            a = -a;
            b = -b;
        }
        return {script_kind::gmean, a, b, 0};
    }
    if (k < 74)
        return {script_kind::divide, random_number(rng, -30, 30, true), random_number(rng, -30, 30, true), 0};
    if (k < 98) {
        int n = nn(rng);
        auto x = random_number(rng, -40, 40, n % 2 == 1);
        return {script_kind::root, x, SignedScaled::from_real(Real(1)), n};
    }
    std::uniform_real_distribution<double> big(1.5, 400.0);
    auto x = SignedScaled::from_real(OracleReal(big(rng)));
    auto a = SignedScaled::from_real(OracleReal(big(rng)));
    return {script_kind::cf_recover, x, a, 0};
}

inline MeasurementModel cf_model(const Real& resolution)
{
    MeasurementModel m;
    m.resolution = resolution;
    m.arm_min = Real("0.001");
    m.arm_max = 3;
    return m;
}

inline MeasuredResult run_script(const script_case& c, const MeasurementModel& model)
{
    switch (c.kind) {
    case script_kind::power: return simulate_power(c.x, c.n, model);
    case script_kind::gmean: return simulate_gmean(c.x, c.y, model);
    case script_kind::divide: return simulate_divide(c.x, c.y, model);
    case script_kind::root: return simulate_root(c.x, c.n, model);
    case script_kind::cf_recover: return simulate_cf_recover(c.x, c.y, cf_model(model.resolution)).result;
    }
    throw calc_error(errc::domain_error, "unknown script");
}

inline OracleReal exact_value(const script_case& c)
{
    switch (c.kind) {
    case script_kind::power: return oracle::pow(c.x, c.n).to<OracleReal>();
    case script_kind::gmean: return oracle::gmean(c.x, c.y).to<OracleReal>();
    case script_kind::divide: return oracle::div(c.x, c.y).to<OracleReal>();
    case script_kind::root: return oracle::root(c.x, c.n).to<OracleReal>();
    case script_kind::cf_recover: return oracle::ln(c.y) / oracle::ln(c.x);
    }
    return 0;
}

inline script_check check_script(const script_case& c, const MeasurementModel& model)
{
    script_check out;
    MeasuredResult res;
    try {
        res = run_script(c, model);
    } catch (const calc_error& e) {
        if (e.code() == errc::arm_out_of_range || e.code() == errc::degenerate_angle)
            return out;
        out.ran = true;
        out.bound_ok = false;
        out.failure = std::string(errc_name(e.code())) + ": " + e.what();
        return out;
    }
    out.ran = true;
    Real half = model.resolution / 2;
    for (const auto& r : res.readings) {
        if (abs(r.length - r.exact) > half * (1 + Real("1e-20"))) {
            out.readings_ok = false;
            out.failure = "reading " + r.arm + " off by more than half a graduation";
        }
    }
    precision_guard g(PrecisionPolicy{});
    OracleReal v = res.value.to<OracleReal>();
    OracleReal hw = res.half_width.to<OracleReal>();
    out.half_width = hw;
    OracleReal err = abs(v - exact_value(c));
    if (!(err <= hw)) {
        out.bound_ok = false;
        out.failure = "error " + to_text(SignedScaled::from_real(err), 6) + " above half width " +
                      to_text(res.half_width, 6);
    }
    return out;
}

}  // namespace geocalc::testing
