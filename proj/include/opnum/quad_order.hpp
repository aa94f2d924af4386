#pragma once

// Arithmetic in the order Z[sqrt(d)] (not the maximal order: d = 1 - q is
// used as given, even when it is not squarefree) and the exact identities
// behind the nonexistence argument for 2n^2 = sigma(q^alpha).

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "opnum/arith.hpp"

namespace opnum {

/// a + b*sqrt(d).
struct QuadInt {
    Integer d;
    Integer a;
    Integer b;

    static QuadInt one(const Integer& d) { return {d, 1, 0}; }
    static QuadInt rational(const Integer& d, const Integer& a) { return {d, a, 0}; }

    bool is_zero() const { return a == 0 && b == 0; }

    friend bool operator==(const QuadInt& x, const QuadInt& y) {
        return x.d == y.d && x.a == y.a && x.b == y.b;
    }

    std::string str() const {
        std::string s = a.get_str();
        s += b < 0 ? " - " : " + ";
        s += Integer(abs(b)).get_str();
        s += "*sqrt(" + d.get_str() + ")";
        return s;
    }
};

inline std::ostream& operator<<(std::ostream& os, const QuadInt& x) { return os << x.str(); }

enum class UnitSign : int { minus = -1, plus = 1 };

namespace detail {
inline void require_same_order(const QuadInt& x, const QuadInt& y) {
    if (x.d != y.d) {
        throw parameter_mismatch_error("elements of Z[sqrt(" + x.d.get_str() + ")] and Z[sqrt(" +
                                       y.d.get_str() + ")] do not interoperate");
    }
}
}  // namespace detail

inline QuadInt conj(const QuadInt& x) { return {x.d, x.a, -x.b}; }

inline QuadInt add(const QuadInt& x, const QuadInt& y) {
    detail::require_same_order(x, y);
    return {x.d, x.a + y.a, x.b + y.b};
}

inline QuadInt mul(const QuadInt& x, const QuadInt& y) {
    detail::require_same_order(x, y);
    return {x.d, x.a * y.a + x.d * x.b * y.b, x.a * y.b + y.a * x.b};
}

inline Integer norm(const QuadInt& x) { return x.a * x.a - x.d * x.b * x.b; }

inline Integer trace(const QuadInt& x) { return 2 * x.a; }

inline QuadInt pow(QuadInt base, std::uint64_t m) {
    QuadInt r = QuadInt::one(base.d);
    while (m) {
        if (m & 1) r = mul(r, base);
        m >>= 1;
        if (m) base = mul(base, base);
    }
    return r;
}

/// Whether y = x*z for some z in Z[sqrt(d)]. Solves
///   [x.a  d*x.b] [z.a]   [y.a]
///   [x.b  x.a  ] [z.b] = [y.b]
/// whose determinant is norm(x), and checks both coordinates are integral.
inline bool divides(const QuadInt& x, const QuadInt& y) {
    detail::require_same_order(x, y);
    if (x.is_zero()) throw precondition_error("divisibility by zero");
    const Integer det = norm(x);
    if (det == 0) {
        throw precondition_error("singular divisibility system: d = " + x.d.get_str() +
                                 " is a perfect square");
    }
    // y * conj(x) = z * norm(x)
    const QuadInt num = mul(y, conj(x));
    return mpz_divisible_p(num.a.get_mpz_t(), det.get_mpz_t()) &&
           mpz_divisible_p(num.b.get_mpz_t(), det.get_mpz_t());
}

/// Unit group of Z[sqrt(d)]. Only the case where it is {+1, -1} is supported.
inline std::array<UnitSign, 2> units(const Integer& d) {
    if (d >= 0) throw precondition_error("unit group of a real order is infinite");
    if (d == -1 || d == -3) {
        throw precondition_error("Z[sqrt(" + d.get_str() + ")] has units beyond +-1");
    }
    return {UnitSign::plus, UnitSign::minus};
}

/// 2 + 2 * sum_{i=1}^{floor(m/2)} C(m, 2i) d^i, the trace of (1 +- sqrt(d))^m
/// written out by the binomial theorem.
inline Integer trace_expansion(std::uint64_t m, const Integer& d) {
    if (m < 1) throw precondition_error("trace_expansion requires m >= 1");
    Integer sum = 0;
    Integer dpow = 1;
    for (std::uint64_t i = 1; 2 * i <= m; ++i) {
        dpow *= d;
        sum += binomial(m, 2 * i) * dpow;
    }
    return 2 + 2 * sum;
}

/// C(m, 2i) / C(m, 2) == C(m-2, 2i-2) / (i (2i-1)) as exact rationals.
inline bool ratio_identity_check(std::uint64_t m, std::uint64_t i) {
    if (m < 4 || i < 2 || 2 * i > m) {
        throw precondition_error("ratio identity needs m >= 4 and 2 <= i <= m/2");
    }
    const Rational lhs = make_rational(binomial(m, 2 * i), binomial(m, 2));
    const Rational rhs = make_rational(binomial(m - 2, 2 * i - 2), from_u64(i * (2 * i - 1)));
    return lhs == rhs;
}

// ---------------------------------------------------------------------------
// 2-adic certificate
// ---------------------------------------------------------------------------

struct SummandValuation {
    std::uint64_t i = 0;
    long v2 = 0;
};

struct CertificateReport {
    Natural q;
    std::uint64_t alpha = 0;
    std::vector<SummandValuation> summands;
    Rational s;                  // 1 + sum of the summands
    long v2_total = 0;           // v2(s); meaningful only when s != 0
    bool s_nonzero = false;
    bool forms_agree = false;    // binomial-ratio form equals the reduced form
    bool passed = false;
};

/// For q = 1 mod 4 prime and odd alpha >= 3, with m = (alpha+1)/2, evaluates
///   S = 1 + sum_{i=2}^{floor((alpha+1)/4)} C((alpha-3)/2, 2i-2)/(2i-1) * (1-q)^{i-1}/i
/// and checks that every summand has positive 2-adic valuation while S itself
/// is a 2-adic unit, so S = 0 is impossible. The same S is also evaluated in
/// the form sum C(m, 2i)/C(m, 2) (1-q)^{i-1} and the two must agree.
inline CertificateReport two_adic_certificate(const Natural& q, std::uint64_t alpha) {
    if (!is_prime(q)) throw precondition_error("q = " + q.get_str() + " is not prime");
    if (mpz_fdiv_ui(q.get_mpz_t(), 4) != 1) {
        throw precondition_error("q = " + q.get_str() + " is not 1 mod 4");
    }
    if (alpha % 2 == 0 || alpha < 3) {
        throw precondition_error("alpha = " + std::to_string(alpha) + " must be odd and >= 3");
    }

    CertificateReport rep;
    rep.q = q;
    rep.alpha = alpha;

    const Integer d = 1 - q;
    const std::uint64_t m = (alpha + 1) / 2;
    const std::uint64_t top = (alpha + 1) / 4;
    const Natural c_m2 = binomial(m, 2);

    Rational reduced = 1;
    Rational ratio_form = 1;
    Integer dpow = 1;
    for (std::uint64_t i = 2; i <= top; ++i) {
        dpow *= d;
        const Rational term = make_rational(binomial((alpha - 3) / 2, 2 * i - 2) * dpow,
                                            from_u64((2 * i - 1) * i));
        rep.summands.push_back({i, v2(term)});
        reduced += term;
        ratio_form += make_rational(binomial(m, 2 * i) * dpow, c_m2);
    }
    reduced.canonicalize();
    ratio_form.canonicalize();

    rep.s = reduced;
    rep.forms_agree = reduced == ratio_form;
    rep.s_nonzero = reduced != 0;
    if (rep.s_nonzero) rep.v2_total = v2(reduced);

    bool summands_even = true;
    for (const auto& sv : rep.summands) summands_even = summands_even && sv.v2 >= 1;
    rep.passed = summands_even && rep.s_nonzero && rep.v2_total == 0 && rep.forms_agree;
    return rep;
}

}  // namespace opnum
