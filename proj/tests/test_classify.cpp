#include <gtest/gtest.h>

#include <random>

#include "opnum/classify.hpp"
#include "oracles.hpp"

using namespace opnum;

namespace {

// sigma(n) for all n <= limit by adding every d to each of its multiples.
std::vector<std::uint64_t> divisor_accumulation(std::uint64_t limit) {
    std::vector<std::uint64_t> s(limit + 1, 0);
    for (std::uint64_t d = 1; d <= limit; ++d) {
        for (std::uint64_t m = d; m <= limit; m += d) s[m] += d;
    }
    return s;
}

}  // namespace

TEST(SigmaSieve, MatchesDivisorAccumulation) {
    const auto ref = divisor_accumulation(300'000);
    std::uint64_t expected = 1;
    for_each_sigma(
        1, 300'000,
        [&](std::uint64_t n, std::uint64_t s) {
            ASSERT_EQ(n, expected++);
            ASSERT_EQ(s, ref[n]) << n;
        },
        4096);
    EXPECT_EQ(expected, 300'001u);
}

TEST(SigmaSieve, ArbitraryWindow) {
    for_each_sigma(999'000'000'000ull, 999'000'000'500ull, [](std::uint64_t n, std::uint64_t s) {
        ASSERT_EQ(s, oracle::sigma_enum(n)) << n;
    });
}

TEST(Abundancy, Examples) {
    const auto six = abundancy(6);
    EXPECT_EQ(six.sigma, 12);
    EXPECT_EQ(six.k, Natural(2));
    const auto n672 = abundancy(672);
    EXPECT_EQ(n672.sigma, 2016);
    EXPECT_EQ(n672.k, Natural(3));
    const auto ten = abundancy(10);
    EXPECT_EQ(ten.sigma, 18);
    EXPECT_FALSE(ten.k);
    EXPECT_THROW(abundancy(0), precondition_error);
}

TEST(EnumerateMultiperfect, Examples) {
    using M = std::vector<Multiperfect>;
    EXPECT_EQ(enumerate_multiperfect(1000), (M{{1, 1}, {6, 2}, {28, 2}, {120, 3}, {496, 2}, {672, 3}}));
    EXPECT_EQ(enumerate_multiperfect(5), (M{{1, 1}}));
    EXPECT_EQ(enumerate_multiperfect(1'000'000),
              (M{{1, 1}, {6, 2}, {28, 2}, {120, 3}, {496, 2}, {672, 3}, {8128, 2}, {30240, 4},
                 {32760, 4}, {523776, 3}}));
    EXPECT_THROW(enumerate_multiperfect(0), precondition_error);
}

TEST(EnumerateMultiperfect, MatchesBruteForce) {
    const auto ref = divisor_accumulation(1'000'000);
    std::vector<Multiperfect> expected;
    for (std::uint64_t n = 1; n <= 1'000'000; ++n) {
        if (ref[n] % n == 0) expected.push_back({n, ref[n] / n});
    }
    EXPECT_EQ(enumerate_multiperfect(1'000'000), expected);
}

TEST(DhpDecompose, Examples) {
    EXPECT_EQ(dhp_decompose(672), (DhpDecomposition{21, 2, 5}));
    EXPECT_EQ(oracle::sigma_enum(21), 32u);
    EXPECT_EQ(dhp_decompose(28), (DhpDecomposition{4, 7, 1}));
    EXPECT_EQ(dhp_decompose(6), (DhpDecomposition{2, 3, 1}));
    EXPECT_FALSE(dhp_decompose(120));
    EXPECT_THROW(dhp_decompose(1), precondition_error);
}

TEST(DhpDecompose, SucceedsOnEveryEvenPerfectBelow1e8) {
    for (unsigned p : {2u, 3u, 5u, 7u, 13u}) {
        const Natural n = ipow(2, p - 1) * (ipow(2, p) - 1);
        ASSERT_LE(n, 100'000'000);
        EXPECT_TRUE(is_even_perfect(n));
        const auto dec = dhp_decompose(n);
        ASSERT_TRUE(dec) << n;
        EXPECT_EQ(sigma(dec->m), ipow(dec->q, dec->alpha));
    }
    EXPECT_FALSE(is_even_perfect(672));
    EXPECT_FALSE(is_even_perfect(2 * 2 * 2 * 2 * 2 * 2 * 2 * 2 * 2 * 2 * 2 * 2047));  // 2^11 - 1 composite
}

TEST(DhpScan, Examples) {
    using V = std::vector<std::uint64_t>;
    EXPECT_EQ(dhp_scan(1'000'000), (V{6, 28, 496, 672, 8128}));
    EXPECT_EQ(dhp_scan(100), (V{6, 28}));
    EXPECT_EQ(dhp_scan(5), V{});
    EXPECT_THROW(dhp_scan(1), precondition_error);
}

TEST(EulerForm, Examples) {
    EXPECT_EQ(euler_form(45), (EulerForm{3, 5, 1}));
    EXPECT_FALSE(euler_form(225));
    EXPECT_FALSE(euler_form(63));
    EXPECT_FALSE(euler_form(1));
    EXPECT_FALSE(euler_form(Natural(9 * 125)));       // alpha = 3
    EXPECT_FALSE(euler_form(Natural(5 * 13)));        // two odd exponents
    EXPECT_THROW(euler_form(10), precondition_error);
}

TEST(EulerForm, RoundTrips) {
    std::mt19937_64 rng(31);
    const std::vector<unsigned> qs{5, 13, 17, 29, 37, 41, 53};
    int tested = 0;
    while (tested < 500) {
        const unsigned q = qs[rng() % qs.size()];
        const unsigned alpha = 1 + 4 * static_cast<unsigned>(rng() % 3);
        const Natural n0 = from_u64(2 * (rng() % 5000) + 1);
        if (mpz_divisible_ui_p(n0.get_mpz_t(), q)) continue;
        ++tested;
        const Natural n = n0 * n0 * ipow(q, alpha);
        const auto ef = euler_form(n);
        ASSERT_TRUE(ef) << n;
        EXPECT_EQ(*ef, (EulerForm{n0, q, alpha}));
    }
}

TEST(ChenLuo, Examples) {
    const auto three = chenluo_check(3);
    EXPECT_EQ(three.s, 1u);
    EXPECT_EQ(three.v2_sigma, 2);
    ASSERT_EQ(three.entries.size(), 1u);
    EXPECT_EQ(three.entries[0].a, 1);   // 3 = 2^2 - 1 mod 2^3
    EXPECT_EQ(three.entries[0].b, 0);

    const auto nine = chenluo_check(9);
    EXPECT_EQ(nine.s, 0u);
    EXPECT_EQ(nine.v2_sigma, 0);

    const auto fifteen = chenluo_check(15);
    EXPECT_EQ(oracle::sigma_enum(15), 24u);
    EXPECT_EQ(fifteen.v2_sigma, 3);
    EXPECT_EQ(fifteen.s, 2u);

    EXPECT_THROW(chenluo_check(1), precondition_error);
    EXPECT_THROW(chenluo_check(12), precondition_error);
}

TEST(ChenLuo, CongruenceMeaningOfAAndB) {
    // p = 2^(a+1) - 1 mod 2^(a+2), alpha = 2^(b+1) - 1 mod 2^(b+2).
    for (std::uint64_t n = 3; n < 20'000; n += 2) {
        for (const auto& e : chenluo_check(from_u64(n)).entries) {
            const unsigned long p = e.p.get_ui();
            EXPECT_EQ(p % (1ul << (e.a + 2)), (1ul << (e.a + 1)) - 1);
            EXPECT_EQ(e.alpha % (1ul << (e.b + 2)), (1ul << (e.b + 1)) - 1);
        }
    }
}

TEST(ChenLuo, ExhaustiveTo1e5) {
    for (std::uint64_t n = 3; n <= 100'000; n += 2) {
        ASSERT_NO_THROW(chenluo_check(from_u64(n))) << n;
    }
}

TEST(OmegaBound, Examples) {
    EXPECT_EQ(omega_bound_product(8), Natural("36163554870725919"));
    EXPECT_EQ(omega_bound_product(1), 13);
    EXPECT_EQ(omega_bound_product(2), 403);
    EXPECT_THROW(omega_bound_product(0), precondition_error);
    EXPECT_THROW(omega_bound_product(1001), precondition_error);
}

TEST(OmegaBound, StrictlyIncreasing) {
    Natural prev = 0;
    for (unsigned c = 1; c <= 1000; c += 37) {
        const Natural cur = omega_bound_product(c);
        EXPECT_GT(cur, prev);
        prev = cur;
    }
    EXPECT_GT(omega_bound_product(1000), omega_bound_product(999));
}

TEST(Classify, ReportJson) {
    const auto j = to_json(classify(45));
    EXPECT_EQ(j.at("sigma"), 78);
    EXPECT_TRUE(j.at("k").is_null());
    EXPECT_EQ(j.at("euler_form").at("q"), 5);
    EXPECT_EQ(j.at("chenluo").at("v2_sigma"), 1);

    const auto p = to_json(classify(672));
    EXPECT_EQ(p.dump(),
              R"({"n":672,"sigma":2016,"k":3,"euler_form":null,"dhp":{"m":21,"q":2,"alpha":5},"chenluo":null})");
}

TEST(OddEmptiness, NoOddMultiperfectBelow1e7) {
    std::uint64_t found = 0;
    for_each_sigma(1, 10'000'000, [&](std::uint64_t n, std::uint64_t s) {
        if ((n & 1) && n > 1 && s % n == 0) ++found;
    });
    EXPECT_EQ(found, 0u);
}
