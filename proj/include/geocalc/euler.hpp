#pragma once

// e as the reciprocal of the n-th perpendicular when cos C = n/(n+1).

#include "cascade.hpp"

#include <map>
#include <mutex>

namespace geocalc {

/// Reference value of e, used only for the error bound.
inline const char* const euler_reference_digits =
    "2.71828182845904523536028747135266249775724709369995957496696762772407663035354759457138217852516642742746";

struct EulerApprox {
    std::int64_t n_steps = 1;
    Real value;
    Real error_bound;
};

inline EulerApprox approximate_e(std::int64_t n_steps, const EngineConfig& cfg = {})
{
    if (n_steps < 1)
        throw calc_error(errc::domain_error, "n_steps must be >= 1");
    precision_guard g(cfg.precision);
    Real n(n_steps);
    Real cos_c = n / (n + 1);
    Real pn = detail::cascade_length(cos_c, Real(1), n_steps, cfg.literal_depth);
    if (auto* t = cfg.sink())
        figure::emit_cascade(*t, cos_c.convert_to<double>(), 1.0, n_steps, detail::trace_value(pn));
    EulerApprox out;
    out.n_steps = n_steps;
    out.value = 1 / pn;
    out.error_bound = Real(euler_reference_digits) / (2 * n);
    return out;
}

/// Steps used for the module's own e.
inline constexpr std::int64_t cached_euler_steps = 100'000'000;

/// e from approximate_e(10^8), computed once per working precision.
inline Real cached_euler_e(const PrecisionPolicy& policy = {})
{
    static std::mutex mu;
    static std::map<int, Real> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(policy.working_digits);
    if (it == cache.end()) {
        EngineConfig cfg;
        cfg.precision = policy;
        it = cache.emplace(policy.working_digits, approximate_e(cached_euler_steps, cfg).value).first;
    }
    return it->second;
}

}  // namespace geocalc
