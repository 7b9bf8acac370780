#include <geocalc/root_search.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace geocalc;

namespace {

SignedScaled S(const char* text) { return normalize(text); }
OracleReal rel(const SignedScaled& a, const SignedScaled& b) { return relative_difference(a, b); }
const OracleReal tight("1e-12");

}  // namespace

TEST(NthRoot, WorkedExamples)
{
    auto r = nth_root(S("0.5972e25"), 6);
    // oracle: 1.346955660881422313145502509e4
    EXPECT_LT(rel(r, S("1.346955660881422313145502509e4")), tight);
    EXPECT_LT(rel(r, oracle::root(S("0.5972e25"), 6)), tight);
    EXPECT_LT(rel(nth_root(S("8"), 3), S("2")), tight);
    EXPECT_LT(rel(nth_root(S("-27"), 3), S("-3")), tight);
    try {
        nth_root(S("-4"), 2);
        ADD_FAILURE();
    } catch (const calc_error& e) {
        EXPECT_EQ(e.code(), errc::even_root_of_negative);
    }
}

TEST(NthRoot, PowersOfTenAreExact)
{
    EXPECT_EQ(nth_root(S("1"), 7), S("1"));
    EXPECT_EQ(nth_root(S("1e12"), 4), S("1e3"));
    EXPECT_EQ(nth_root(S("1e-12"), 3), S("1e-4"));
    EXPECT_LT(rel(nth_root(S("10"), 2), oracle::root(S("10"), 2)), tight);
}

TEST(NthRoot, FractionalForm)
{
    auto q = RootQuery::fraction(S("32157"), S("121"), 5);
    EXPECT_LT(rel(nth_root(q), oracle::root(oracle::div(S("32157"), S("121")), 5)), tight);
    auto neg = RootQuery::fraction(S("-32157"), S("121"), 17);
    EXPECT_LT(rel(nth_root(neg), oracle::root(oracle::div(S("-32157"), S("121")), 17)), tight);
}

TEST(NthRoot, MatchesOracleAndRoundTrips)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mant(0.1, 1.0);
    std::uniform_int_distribution<int> ex(-30, 30), nn(1, 64), sg(0, 1);
    for (int i = 0; i < 1000; ++i) {
        int n = nn(rng);
        int sign = (n % 2 != 0 && sg(rng)) ? -1 : 1;
        SignedScaled x(sign, OracleReal(mant(rng)), ex(rng));
        auto r = nth_root(x, n);
        ASSERT_LT(rel(r, oracle::root(x, n)), tight) << to_text(x, 20) << " n=" << n;
        ASSERT_LT(rel(power(r, n), x), OracleReal("1e-10"));
        ASSERT_EQ(r.sign(), x.sign());
        // root lies between 1 and x
        auto one = S("1");
        if (compare_abs(x, one) < 0) {
            ASSERT_GE(compare_abs(r, x), 0);
            ASSERT_LE(compare_abs(r, one), 0);
        } else {
            ASSERT_LE(compare_abs(r, x), 0);
            ASSERT_GE(compare_abs(r, one), 0);
        }
    }
}

TEST(NthRoot, NearOneStaysInsideInterval)
{
    auto x = S("1.0000000000000000000000000000000000000001");
    auto r = nth_root(x, 3);
    EXPECT_GE(compare_abs(r, S("1")), 0);
    EXPECT_LE(compare_abs(r, x), 0);
    auto y = S("0.9999999999999999999999999999999999999999");
    auto ry = nth_root(y, 4);
    EXPECT_GE(compare_abs(ry, y), 0);
    EXPECT_LE(compare_abs(ry, S("1")), 0);
}

TEST(SearchCosine, BracketHoldsAndHalves)
{
    EngineConfig cfg;
    precision_guard g(cfg.precision);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> t(0.001, 0.999);
    std::uniform_int_distribution<int> nn(1, 40);
    for (int i = 0; i < 100; ++i) {
        Real target(t(rng));
        int n = nn(rng);
        Real prev_width = 1;
        int steps = 0;
        auto res = search_cosine(Real(1), n, target, cfg, [&](const bracket_step& s) {
            // f(c) = c^n evaluated independently of the search
            ASSERT_LE(pow(s.lo, n), target * (1 + Real("1e-28")));
            ASSERT_GE(pow(s.hi, n), target * (1 - Real("1e-28")));
            ASSERT_LE(s.f_lo, s.target);
            ASSERT_GE(s.f_hi, s.target);
            Real width = s.hi - s.lo;
            ASSERT_EQ(width, prev_width / 2);
            prev_width = width;
            ++steps;
        });
        EXPECT_EQ(steps, res.iterations);
        EXPECT_LT(res.iterations, 200);
    }
    EXPECT_THROW(search_cosine(Real(1), 3, Real(2), cfg), calc_error);
}

TEST(RationalPower, WorkedExamples)
{
    auto x = S("0.5972e25");
    auto parts = rational_power_parts(x, 19, 7);
    EXPECT_EQ(parts.power_of_ten, 68);
    // residue factor is 10^(-1/7)
    EXPECT_LT(rel(parts.residue, oracle::rational_pow(S("10"), -1, 7)), tight);
    EXPECT_LT(rel(parts.mantissa_part, oracle::rational_pow(S("0.5972"), 19, 7)), tight);
    auto v = rational_power(x, 19, 7);
    EXPECT_LT(rel(v, oracle::rational_pow(x, 19, 7)), OracleReal("1e-10"));
    EXPECT_EQ(to_text(v, 4), "1.776e67");
    EXPECT_LT(rel(rational_power(S("4"), 3, 2), S("8")), tight);
    EXPECT_LT(rel(rational_power(S("4"), 3, 2, power_strategy::compose), S("8")), tight);
    auto y = S("-3.75e-4");
    EXPECT_EQ(rational_power(y, 1, 1), y);
    EXPECT_THROW(rational_power(S("-2"), 1, 2), calc_error);
    EXPECT_LT(rel(rational_power(S("-8"), 2, 3), S("4")), tight);
    EXPECT_LT(rel(rational_power(S("-8"), -1, 3), S("-0.5")), tight);
}

TEST(RationalPower, StrategiesAgreeWithOracleAndEachOther)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> mant(0.1, 1.0);
    std::uniform_int_distribution<int> ex(-5, 5), mm(1, 100), nn(1, 20);
    for (int i = 0; i < 1000; ++i) {
        SignedScaled x(1, OracleReal(mant(rng)), ex(rng));
        int m = mm(rng), n = nn(rng);
        auto a = rational_power(x, m, n, power_strategy::compose);
        auto b = rational_power(x, m, n, power_strategy::split);
        ASSERT_LT(rel(a, b), OracleReal("1e-10")) << to_text(x, 20) << " " << m << "/" << n;
        ASSERT_LT(rel(b, oracle::rational_pow(x, m, n)), OracleReal("1e-10"));
    }
}

TEST(RootTrace, EvenAndOddAnchoring)
{
    GeometricPrimitiveTrace even, odd;
    EngineConfig cfg;
    cfg.trace = &even;
    nth_root(S("0.5"), 4, cfg);
    cfg.trace = &odd;
    nth_root(S("0.5"), 3, cfg);
    auto count = [](const GeometricPrimitiveTrace& t, primitive k) {
        return std::count_if(t.steps().begin(), t.steps().end(), [&](const TraceStep& s) { return s.kind == k; });
    };
    EXPECT_GT(count(even, primitive::rotate_hypotenuse), 0);
    EXPECT_GT(count(odd, primitive::rotate_hypotenuse), 0);
    // even n reads AB, odd n reads BD off the held perpendicular p_(n+1)
    EXPECT_EQ(even.steps().back().points[0].label, "A1");
    EXPECT_EQ(odd.steps().back().points[0].label, "B1");
    auto back = GeometricPrimitiveTrace::parse(even.to_text());
    EXPECT_EQ(back.to_text(), even.to_text());
}
