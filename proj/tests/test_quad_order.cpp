#include <gtest/gtest.h>

#include <random>

#include "opnum/identities.hpp"
#include "opnum/json_io.hpp"
#include "opnum/quad_order.hpp"
#include "oracles.hpp"

using namespace opnum;

namespace {

// Expands (a + b sqrt(d))^m term by term with the binomial theorem and
// Pascal's triangle; independent of QuadInt::pow and binomial().
std::pair<Integer, Integer> expand_power(long a, long b, long d, unsigned m) {
    const auto t = oracle::pascal(m);
    Integer ra = 0, rb = 0;
    for (unsigned k = 0; k <= m; ++k) {
        // C(m,k) a^(m-k) (b sqrt d)^k
        Integer c(oracle::to_string(t[m][k]));
        Integer term = c * ipow(a, m - k) * ipow(b, k) * ipow(d, k / 2);
        if (k % 2 == 0) ra += term; else rb += term;
    }
    return {ra, rb};
}

}  // namespace

TEST(QuadInt, MulExamples) {
    const Integer d = -12;
    EXPECT_EQ(mul(QuadInt{d, 1, 1}, QuadInt{d, 1, -1}), (QuadInt{d, 13, 0}));
    const QuadInt x{d, 5, -3};
    EXPECT_EQ(mul(x, QuadInt::one(d)), x);
    EXPECT_EQ(mul(QuadInt{-4, 1, 2}, QuadInt{-4, 3, 1}), (QuadInt{-4, -5, 7}));
    EXPECT_THROW(mul(QuadInt{-4, 1, 1}, QuadInt{-8, 1, 1}), parameter_mismatch_error);
}

TEST(QuadInt, NormExamples) {
    EXPECT_EQ(norm(QuadInt{-12, 1, 1}), 13);
    EXPECT_EQ(norm(QuadInt{-4, 1, 1}), 5);
    EXPECT_EQ(norm(QuadInt{-4, 0, 0}), 0);
}

TEST(QuadInt, TraceExamples) {
    EXPECT_EQ(trace(QuadInt{-12, 1, 1}), 2);
    const auto [a, b] = expand_power(1, 1, -4, 2);
    EXPECT_EQ(trace(pow(QuadInt{-4, 1, 1}, 2)), 2 * a);
    EXPECT_EQ(trace(pow(QuadInt{-4, 1, 1}, 2)), -6);
    const QuadInt x{-7, 4, 9};
    EXPECT_EQ(trace(conj(x)), trace(x));
}

TEST(QuadInt, PowExamples) {
    EXPECT_EQ(pow(QuadInt{-12, 1, 1}, 0), QuadInt::one(-12));
    EXPECT_EQ(norm(pow(QuadInt{-12, 1, 1}, 5)), 371293);
    EXPECT_EQ(ipow(13, 5), 371293);
    EXPECT_EQ(pow(QuadInt{-12, 1, 1}, 2), (QuadInt{-12, -11, 2}));
}

TEST(QuadInt, PowMatchesBinomialExpansion) {
    for (long d : {-4L, -7L, -12L, -100L}) {
        for (unsigned m = 0; m <= 25; ++m) {
            const auto [a, b] = expand_power(3, -2, d, m);
            ASSERT_EQ(pow(QuadInt{d, 3, -2}, m), (QuadInt{d, a, b})) << d << " " << m;
        }
    }
}

TEST(QuadInt, NormIsMultiplicative) {
    std::mt19937_64 rng(17);
    auto coord = [&] { return Integer(static_cast<long>(rng() % 20001) - 10000); };
    for (long d : {-4L, -8L, -12L, -16L, -100L}) {
        for (int t = 0; t < 500; ++t) {
            const QuadInt x{d, coord(), coord()}, y{d, coord(), coord()};
            ASSERT_EQ(norm(mul(x, y)), norm(x) * norm(y));
            ASSERT_GE(norm(x), 0);
        }
    }
}

TEST(QuadInt, ConjugateProduct) {
    // (1 + b sqrt d)(1 - b sqrt d) = 1 - d b^2 = 1 + (q-1) b^2 for d = 1 - q.
    for (long q : {5L, 13L, 17L, 29L}) {
        const Integer d = 1 - q;
        for (long b = 0; b < 40; ++b) {
            ASSERT_EQ(mul(QuadInt{d, 1, b}, QuadInt{d, 1, -b}), (QuadInt{d, 1 + (q - 1) * b * b, 0}));
        }
    }
}

TEST(Divides, Examples) {
    const Integer d = -12;
    EXPECT_TRUE(divides(QuadInt{d, 13, 0}, QuadInt{d, 13, 13}));
    EXPECT_FALSE(divides(QuadInt{d, 13, 0}, QuadInt{d, 1, 1}));
    const QuadInt x{d, 1, 1};
    EXPECT_TRUE(divides(x, mul(x, QuadInt{d, 2, 3})));
    EXPECT_THROW(divides(QuadInt{d, 0, 0}, x), precondition_error);
    EXPECT_THROW(divides(QuadInt{4, 2, 1}, QuadInt{4, 1, 0}), precondition_error);
    EXPECT_THROW(divides(QuadInt{-4, 1, 0}, x), parameter_mismatch_error);
}

TEST(Divides, ConstructedMultiplesAndNonMultiples) {
    std::mt19937_64 rng(23);
    auto coord = [&] { return Integer(static_cast<long>(rng() % 201) - 100); };
    for (long d : {-4L, -12L, -28L}) {
        for (int t = 0; t < 300; ++t) {
            QuadInt x{d, coord(), coord()};
            if (x.is_zero()) continue;
            const QuadInt z{d, coord(), coord()};
            ASSERT_TRUE(divides(x, mul(x, z)));
            // x*z + 1 is a multiple of x only if x is a unit.
            if (norm(x) > 1) { ASSERT_FALSE(divides(x, add(mul(x, z), QuadInt::one(d)))); }
        }
    }
}

TEST(Divides, PrimeElementsAboveQAreNotDivisibleByQ) {
    // q = 2 is excluded: (1 + i)^2 = 2i.
    for (std::uint32_t q : primes_up_to(200)) {
        if (q == 2) continue;
        const Integer d = 1 - Integer(q);
        for (unsigned m = 1; m <= 20; ++m) {
            ASSERT_FALSE(divides(QuadInt::rational(d, q), pow(QuadInt{d, 1, 1}, m))) << q << " " << m;
        }
    }
}

TEST(Units, PlusMinusOneOnly) {
    const auto u = units(-12);
    EXPECT_EQ(u[0], UnitSign::plus);
    EXPECT_EQ(u[1], UnitSign::minus);
    EXPECT_NO_THROW(units(-2));
    EXPECT_THROW(units(-1), precondition_error);
    EXPECT_THROW(units(-3), precondition_error);
    EXPECT_THROW(units(5), precondition_error);
}

TEST(TraceExpansion, Examples) {
    EXPECT_EQ(trace_expansion(1, -12), 2);
    EXPECT_EQ(trace_expansion(1, 12345), 2);
    EXPECT_EQ(trace_expansion(2, -4), -6);
    const auto [a, b] = expand_power(1, 1, -12, 7);
    EXPECT_EQ(trace_expansion(7, -12), 2 * a);
    EXPECT_EQ(trace_expansion(7, -12), trace(pow(QuadInt{-12, 1, 1}, 7)));
    EXPECT_THROW(trace_expansion(0, -4), precondition_error);
}

TEST(TraceExpansion, AgreesWithPowersForBothSigns) {
    const auto r = sweep_trace(60, 200);
    EXPECT_EQ(r.checked, 60u * primes_up_to(200).size());
    EXPECT_TRUE(r.ok()) << r.failures.front();
}

TEST(RatioIdentity, Examples) {
    // C(4,4)/C(4,2) = 1/6 and C(2,2)/(2*3) = 1/6.
    const auto t = oracle::pascal(10);
    auto u = [](oracle::u128 v) { return static_cast<std::uint64_t>(v); };
    EXPECT_EQ(u(t[4][4] * 6), u(t[4][2]));
    EXPECT_TRUE(ratio_identity_check(4, 2));
    // m = 10, i = 3: C(10,6)/C(10,2) = 210/45 = 14/3; C(8,4)/(3*5) = 70/15 = 14/3.
    EXPECT_EQ(u(t[10][6] * 3), u(14 * t[10][2]));
    EXPECT_TRUE(ratio_identity_check(10, 3));
    EXPECT_EQ(u(t[6][4]), u(t[6][2]));
    EXPECT_TRUE(ratio_identity_check(6, 2));
    EXPECT_THROW(ratio_identity_check(3, 2), precondition_error);
    EXPECT_THROW(ratio_identity_check(6, 1), precondition_error);
    EXPECT_THROW(ratio_identity_check(6, 4), precondition_error);
}

TEST(RatioIdentity, HoldsUpTo200) {
    const auto r = sweep_ratio(200);
    EXPECT_TRUE(r.ok()) << r.failures.front();
    EXPECT_GT(r.checked, 9000u);
}

TEST(Certificate, Examples) {
    const auto trivial = two_adic_certificate(13, 3);
    EXPECT_TRUE(trivial.summands.empty());
    EXPECT_EQ(trivial.s, 1);
    EXPECT_EQ(trivial.v2_total, 0);
    EXPECT_TRUE(trivial.passed);

    // Single i = 2 term: C(2,2)/3 * (-12)/2 = -2, so S = -1.
    const auto seven = two_adic_certificate(13, 7);
    ASSERT_EQ(seven.summands.size(), 1u);
    EXPECT_EQ(seven.summands[0].i, 2u);
    EXPECT_EQ(seven.summands[0].v2, 1);
    EXPECT_EQ(seven.s, -1);
    EXPECT_EQ(seven.v2_total, 0);
    EXPECT_TRUE(seven.passed);

    // q = 5, alpha = 11: i = 2, 3 with (alpha-3)/2 = 4.
    //   i=2: C(4,2)/3 * (-4)/2 = -4         (v2 = 2)
    //   i=3: C(4,4)/5 * 16/3  = 16/15       (v2 = 4)
    //   S = 1 - 4 + 16/15 = -29/15
    const auto eleven = two_adic_certificate(5, 11);
    ASSERT_EQ(eleven.summands.size(), 2u);
    EXPECT_EQ(eleven.summands[0].v2, 2);
    EXPECT_EQ(eleven.summands[1].v2, 4);
    EXPECT_EQ(eleven.s, make_rational(-29, 15));
    EXPECT_EQ(eleven.v2_total, 0);
    EXPECT_TRUE(eleven.forms_agree);
    EXPECT_TRUE(eleven.passed);
}

TEST(Certificate, Preconditions) {
    EXPECT_THROW(two_adic_certificate(7, 7), precondition_error);    // 7 = 3 mod 4
    EXPECT_THROW(two_adic_certificate(13, 6), precondition_error);   // even alpha
    EXPECT_THROW(two_adic_certificate(13, 1), precondition_error);   // alpha < 3
    EXPECT_THROW(two_adic_certificate(21, 7), precondition_error);   // not prime
}

TEST(Certificate, JsonShape) {
    const auto j = to_json(two_adic_certificate(13, 7));
    EXPECT_EQ(j.dump(),
              R"({"q":13,"alpha":7,"summands":[{"i":2,"v2":1}],"v2_total":0,"passed":true,"s":"-1","forms_agree":true})");
}

TEST(Certificate, PassesForSmallRange) {
    const auto r = sweep_certificates(1000, 41);
    EXPECT_TRUE(r.ok()) << r.failures.front();
}

TEST(GcdLemma, ConsecutiveEvenNeighbours) {
    const auto r = sweep_gcd(1000, 50);
    EXPECT_EQ(r.checked, 499u * 50u);
    EXPECT_TRUE(r.ok()) << r.failures.front();
}
