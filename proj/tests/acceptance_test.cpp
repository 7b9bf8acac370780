// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include "support/figures.hpp"
#include "support/mech_cases.hpp"

#include <geocalc/diagram.hpp>
#include <geocalc/euler_log.hpp>
#include <geocalc/exponent_solver.hpp>
#include <geocalc/oracle.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <regex>
#include <sstream>

using namespace geocalc;
using namespace geocalc::testing;

namespace {

SignedScaled S(const char* t) { return normalize(t); }

struct verdict {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            notes.push_back("failed: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, const char* f = "%.3g")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

SignedScaled timed(verdict& v, const std::string& name, const std::function<SignedScaled()>& f)
{
    auto t0 = std::chrono::steady_clock::now();
    auto r = f();
    double s = seconds_since(t0);
    v.require(s < 1.0, name + " took " + fmt(s) + " s");
    return r;
}

bool within_abs(const SignedScaled& v, const char* target, const char* tol)
{
    return abs(v.to<OracleReal>() - OracleReal(target)) <= OracleReal(tol);
}

verdict worked_examples()
{
    verdict v;
    auto x = S("32357");
    auto p10 = timed(v, "32357^10", [&] { return power(x, 10); });
    v.require(to_text(p10, 12) == to_text(oracle::pow(x, 10), 12), "32357^10 = " + to_text(p10, 12));
    auto m10 = timed(v, "32357^-10", [&] { return power(x, -10); });
    v.require(to_text(m10, 12) == to_text(oracle::pow(x, -10), 12), "32357^-10 = " + to_text(m10, 12));

    auto rc = timed(v, "reciprocal", [] { return reciprocal(S("-1.602176634e-19")); });
    auto rc8 = normalize(to_text(rc, 8));
    v.require(within_abs(rc8, "-6.2415091e18", "1e11"), "1/q = " + to_text(rc, 8));

    auto q = timed(v, "division", [] { return divide(S("5.972e24"), S("7.348e22")); });
    v.require(within_abs(q, "81.274", "0.001"), "earth/moon = " + to_text(q, 8));

    auto g = timed(v, "gmean", [] { return geometric_mean(S("5.972e24"), S("7.348e22")); });
    v.require(within_abs(g, "6.6244e23", "1e20"), "gmean = " + to_text(g, 8));

    auto r6 = timed(v, "6th root", [] { return nth_root(S("5.972e24"), 6); });
    v.require(within_abs(r6, "1.34697e4", "1"), "6th root = " + to_text(r6, 8));

    auto fr = timed(v, "19/7 power", [] { return rational_power(S("0.5972e25"), 19, 7); });
    v.require(to_text(fr, 10) == to_text(oracle::rational_pow(S("0.5972e25"), 19, 7), 10), "^(19/7) = " + to_text(fr, 12));
    // the 10^(-1/7) factor appears because the exponent 25*19 = 475 leaves residue 6 mod 7
    auto parts = rational_power_parts(S("0.5972e25"), 19, 7);
    v.require(!(parts.residue == S("1")), "expected a fractional power of ten factor");

    v.note("32357^10=" + to_text(p10, 12) + " 1/q=" + to_text(rc, 8) + " ratio=" + to_text(q, 6) + " gmean=" +
           to_text(g, 6) + " root=" + to_text(r6, 6) + " ^(19/7)=" + to_text(fr, 10));
    return v;
}

verdict cf_recovery()
{
    verdict v;
    auto t0 = std::chrono::steady_clock::now();
    auto cf = recover_rational_exponent(S("2"), oracle::rational_pow(S("2"), 1971, 181));
    v.require(cf.to_text() == "[10; 1, 8, 20]" && cf.terminated, "1971/181 gave " + cf.to_text());
    v.require(evaluate_cf(cf).to_text() == "1971/181", "evaluates to " + evaluate_cf(cf).to_text());

    {
        PrecisionPolicy pol;
        precision_guard g(pol);
        OracleReal l = sqrt(OracleReal(2)) * log(OracleReal(3));
        auto a = SignedScaled::from_real(OracleReal(exp(l)));
        CfOptions o;
        o.max_depth = 8;
        auto s2 = recover_rational_exponent(S("3"), a, o);
        v.require(s2.to_text() == "[1; 2, 2, 2, 2, 2, 2, 2]", "sqrt(2) gave " + s2.to_text());
    }

    // every coprime m/n <= 50, bases drawn from a pool of 200 random values
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> bd(1.05, 20.0);
    std::vector<SignedScaled> bases;
    for (int i = 0; i < 200; ++i) {
        double b = bd(rng);
        if (rng() & 1u)
            b = 1 / b;
        bases.push_back(SignedScaled::from_real(OracleReal(b)));
    }
    int pairs = 0, exact = 0;
    std::string first_miss;
    for (int m = 1; m <= 50; ++m) {
        for (int n = 1; n <= 50; ++n) {
            if (std::gcd(m, n) != 1)
                continue;
            const auto& x = bases[static_cast<std::size_t>(pairs) % bases.size()];
            ++pairs;
            try {
                auto c = recover_rational_exponent(x, oracle::rational_pow(x, m, n));
                auto r = evaluate_cf(c);
                if (c.terminated && r.numerator == m && r.denominator == n)
                    ++exact;
                else if (first_miss.empty())
                    first_miss = std::to_string(m) + "/" + std::to_string(n) + " -> " + c.to_text();
            } catch (const calc_error& e) {
                if (first_miss.empty())
                    first_miss = std::to_string(m) + "/" + std::to_string(n) + ": " + e.what();
            }
        }
    }
    double s = seconds_since(t0);
    v.require(exact == pairs, std::to_string(pairs - exact) + " misses, first " + first_miss);
    v.require(s < 60, "took " + fmt(s) + " s");
    v.note(std::to_string(exact) + "/" + std::to_string(pairs) + " coprime pairs exact over 200 bases in " + fmt(s) +
           " s");
    return v;
}

verdict euler_number()
{
    verdict v;
    auto t0 = std::chrono::steady_clock::now();
    auto e6 = approximate_e(1'000'000);
    v.require(abs(e6.value - Real("2.7182818")) <= Real("2e-6"), "approximate_e(1e6) = " + real_to_text(e6.value, 10));
    PrecisionPolicy pol;
    precision_guard g(pol);
    Real e_true(oracle::euler_e(pol));
    for (std::int64_t n = 1; n <= 10'000'000; n *= 10) {
        auto a = approximate_e(n);
        v.require(abs(e_true - a.value) <= e_true / (2 * Real(n)), "bound at n = " + std::to_string(n));
    }
    double s = seconds_since(t0);
    v.require(s < 10, "took " + fmt(s) + " s");
    v.note("approximate_e(1e6) = " + real_to_text(e6.value, 10) + ", ladder in " + fmt(s) + " s");
    return v;
}

verdict change_of_base()
{
    verdict v;
    OracleReal exact = oracle::ln(S("151")) / oracle::ln(S("98"));
    auto lr = recover_exponent_via_logs(S("98"), S("151"));
    OracleReal got = lr.ratio.to<OracleReal>();
    v.require(abs(got - exact) <= OracleReal("1e-4"), "construction ratio " + to_text(lr.ratio, 8));
    auto dev = simulate_cf_recover(S("98"), S("151"), cf_model(Real("1e-10")));
    OracleReal dv = dev.result.value.to<OracleReal>();
    v.require(abs(dv - exact) <= OracleReal("1e-4"), "device ratio " + to_text(dev.result.value, 8));
    v.note("oracle " + to_text(SignedScaled::from_real(exact), 8) + ", construction " + to_text(lr.ratio, 8) +
           ", device at 1e-10 m " + to_text(dev.result.value, 8) + " +/- " + to_text(dev.result.half_width, 2));
    return v;
}

verdict properties()
{
    verdict v;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> mant(0.1, 1.0), cosd(0.01, 0.99), Pd(0.01, 100);
    std::uniform_int_distribution<int> ex(-40, 40), sg(0, 1);
    auto value = [&](bool allow_negative) {
        int s = (allow_negative && sg(rng)) ? -1 : 1;
        return SignedScaled(s, OracleReal(mant(rng)), ex(rng));
    };
    EngineConfig cfg;
    precision_guard g(cfg.precision);
    Real tol = 10 * cfg.precision.rel_tol();
    const OracleReal round_trip("1e-10");

    int bad_cascade = 0;
    for (int i = 0; i < 10'000; ++i) {
        Real c(cosd(rng)), P(Pd(rng));
        auto depth = std::uniform_int_distribution<std::int64_t>(2, 40)(rng);
        auto cas = build_cascade({c, P, depth}, cfg);
        bool ok = true;
        for (std::size_t k = 0; k + 1 < cas.lengths.size(); ++k)
            ok = ok && abs(cas.lengths[k + 1] / cas.lengths[k] - c) <= tol * c;
        // p1 is the mean proportional of P and p2
        Real p1 = cas.lengths[0], p2 = cas.lengths[1];
        ok = ok && abs(p1 * p1 - P * p2) <= tol * P * p2;
        bad_cascade += !ok;
    }
    v.require(bad_cascade == 0, std::to_string(bad_cascade) + " cascades broke the ratio or mean identity");

    int bad_trip = 0, bad_agree = 0, bad_sign = 0;
    for (int i = 0; i < 2000; ++i) {
        int n = std::uniform_int_distribution<int>(1, 40)(rng);
        auto x = value(n % 2 == 1);
        auto r = nth_root(x, n);
        bad_trip += !(relative_difference(power(r, n), x) < round_trip);
        bad_trip += !(relative_difference(nth_root(power(x, n), n), x) < round_trip);
        bad_sign += r.sign() != x.sign();
        bad_sign += power(x, n).sign() != ((x.negative() && n % 2) ? -1 : 1);

        auto a = value(false), b = value(false);
        bad_agree += !(relative_difference(geometric_mean(a, b, gmean_method::bisect),
                                           geometric_mean(a, b, gmean_method::rotate)) < round_trip);
        auto c = value(true), d = value(true);
        auto q1 = divide(c, d, divide_method::hypotenuse), q2 = divide(c, d, divide_method::similar_triangles);
        bad_agree += !(relative_difference(q1, q2) < round_trip);
        bad_sign += q1.sign() != c.sign() * d.sign();
        bad_sign += q2.sign() != c.sign() * d.sign();
        bad_sign += multiply(c, d).sign() != c.sign() * d.sign();
        bad_sign += reciprocal(c).sign() != c.sign();
        auto gm = geometric_mean(-a, -b);
        bad_sign += !gm.negative();
    }
    v.require(bad_trip == 0, std::to_string(bad_trip) + " round trips above 1e-10");
    v.require(bad_agree == 0, std::to_string(bad_agree) + " method disagreements above 1e-10");
    v.require(bad_sign == 0, std::to_string(bad_sign) + " sign errors");
    try {
        nth_root(S("-8"), 2);
        v.require(false, "even root of a negative was accepted");
    } catch (const calc_error& e) {
        v.require(e.code() == errc::even_root_of_negative, "wrong error for even root of a negative");
    }
    v.note("10000 cascades, 2000 rounds of round trips, method agreement and sign checks");
    return v;
}

verdict mech_soundness()
{
    verdict v;
    const int cases = 10'000;
    std::map<std::string, int> ran, bad_reading, bad_bound;
    int monotone_checked = 0, monotone_bad = 0;
    std::string first_failure;
    std::mt19937_64 rng(6);
    for (int i = 0; i < cases; ++i) {
        auto c = random_script(rng);
        OracleReal prev = -1;
        bool chain = true;
        for (const char* res : resolution_ladder) {
            MeasurementModel m;
            m.resolution = Real(res);
            auto chk = check_script(c, m);
            if (!chk.ran) {
                chain = false;
                continue;
            }
            ++ran[res];
            bad_reading[res] += !chk.readings_ok;
            bad_bound[res] += !chk.bound_ok;
            if ((!chk.readings_ok || !chk.bound_ok) && first_failure.empty())
                first_failure = std::string(res) + " case " + std::to_string(i) + ": " + chk.failure;
            if (chain && prev >= 0 && chk.half_width > prev) {
                ++monotone_bad;
                if (first_failure.empty())
                    first_failure = "half width grew at " + std::string(res) + " in case " + std::to_string(i);
            }
            prev = chk.half_width;
        }
        monotone_checked += chain;
    }
    std::string summary;
    for (const char* res : resolution_ladder) {
        v.require(bad_reading[res] == 0 && bad_bound[res] == 0,
                  std::string(res) + ": " + std::to_string(bad_reading[res]) + " bad readings, " +
                      std::to_string(bad_bound[res]) + " bounds missed");
        v.require(ran[res] >= cases * 9 / 10, std::string(res) + ": only " + std::to_string(ran[res]) + " scripts ran");
        summary += std::string(res) + " m: " + std::to_string(ran[res]) + " ran; ";
    }
    v.require(monotone_bad == 0, std::to_string(monotone_bad) + " ladder violations");
    if (!first_failure.empty())
        v.note(first_failure);
    v.note(summary + std::to_string(monotone_checked) + " scripts ran on the whole ladder");
    return v;
}

std::map<std::string, std::pair<double, double>> circles(const std::string& svg)
{
    std::map<std::string, std::pair<double, double>> out;
    std::regex re("<circle class=\"point\" id=\"([^\"]+)\" cx=\"([-0-9.]+)\" cy=\"([-0-9.]+)\"");
    for (std::sregex_iterator it(svg.begin(), svg.end(), re), end; it != end; ++it)
        out[(*it)[1]] = {std::stod((*it)[2]), std::stod((*it)[3])};
    return out;
}

verdict renderer()
{
    verdict v;
    std::regex mark("data-vertex=\"([^\"]+)\" data-arm1=\"([^\"]+)\" data-arm2=\"([^\"]+)\"");
    double worst = 0;
    int marks = 0;
    for (const auto& f : reference_traces()) {
        std::string svg = render_trace(f.trace, 640, 480);
        std::ifstream in(std::string(GEOCALC_SOURCE_DIR) + "/tests/golden/" + f.name + ".svg", std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        v.require(in.good() || !ss.str().empty(), f.name + " golden missing");
        v.require(ss.str() == svg, f.name + " differs from golden");
        auto pts = circles(svg);
        for (std::sregex_iterator it(svg.begin(), svg.end(), mark), end; it != end; ++it) {
            auto [vx, vy] = pts.at((*it)[1]);
            auto [ax, ay] = pts.at((*it)[2]);
            auto [bx, by] = pts.at((*it)[3]);
            double ux = ax - vx, uy = ay - vy, wx = bx - vx, wy = by - vy;
            double c = std::fabs(ux * wx + uy * wy) / (std::hypot(ux, uy) * std::hypot(wx, wy));
            worst = std::max(worst, c);
            ++marks;
        }
    }
    v.require(marks > 0, "no right-angle marks found");
    v.require(worst <= 1e-6, "worst |cos| at a marked right angle " + fmt(worst));
    v.note("4 goldens, " + std::to_string(marks) + " right angles, worst |cos| " + fmt(worst));
    return v;
}

}  // namespace

int main()
{
    struct criterion {
        int id;
        const char* name;
        verdict (*run)();
    };
    const criterion all[] = {
        {1, "worked examples", worked_examples}, {2, "continued fraction recovery", cf_recovery},
        {3, "Euler's number", euler_number},     {4, "change of base", change_of_base},
        {5, "property suites", properties},      {6, "device soundness", mech_soundness},
        {7, "renderer", renderer},
    };
    int failed = 0;
    for (const auto& c : all) {
        verdict v;
        auto t0 = std::chrono::steady_clock::now();
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        double s = seconds_since(t0);
        std::cout << (v.pass ? "PASS " : "FAIL ") << c.id << " " << c.name << " (" << fmt(s, "%.1f") << " s)";
        for (const auto& n : v.notes)
            std::cout << "\n    " << n;
        std::cout << std::endl;
        failed += !v.pass;
    }
    return failed ? 1 : 0;
}
