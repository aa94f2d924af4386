#pragma once

// Exact integer and rational arithmetic plus the number-theoretic primitives
// shared by the rest of the library. Integers are GMP values; nothing here
// ever touches floating point.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opnum/errors.hpp"

namespace opnum {

using Integer = mpz_class;   // arbitrary precision, signed
using Natural = mpz_class;   // arbitrary precision, non-negative by contract
using Rational = mpq_class;   // always canonical (lowest terms, positive denominator)

inline constexpr std::uint64_t kDefaultTrialBound = 1'000'000;

// ---------------------------------------------------------------------------
// Conversions
// ---------------------------------------------------------------------------

inline Integer from_u64(std::uint64_t v) {
    Integer r;
    mpz_import(r.get_mpz_t(), 1, -1, sizeof v, 0, 0, &v);
    return r;
}

inline bool fits_u64(const Integer& v) {
    return sgn(v) >= 0 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 64;
}

inline std::uint64_t to_u64(const Integer& v) {
    if (!fits_u64(v)) {
        throw precondition_error("integer " + v.get_str() + " does not fit in 64 bits");
    }
    std::uint64_t r = 0;
    mpz_export(&r, nullptr, -1, sizeof r, 0, 0, v.get_mpz_t());
    return r;
}

inline Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) {
        throw precondition_error("rational with zero denominator");
    }
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// ---------------------------------------------------------------------------
// Primality
// ---------------------------------------------------------------------------

/// Miller-Rabin with the first 13 prime bases is exact below this bound
/// (Sorenson and Webster, 2015).
inline const Integer& deterministic_bound() {
    static const Integer bound("3317044064679887385961981");
    return bound;
}

inline constexpr std::array<unsigned, 13> kDeterministicBases{2, 3, 5, 7, 11, 13, 17,
                                                              19, 23, 29, 31, 37, 41};

/// Extra bases used above the deterministic bound. The result is then a
/// strong probable prime to all 25 prime bases below 100.
inline constexpr std::array<unsigned, 12> kProbableExtraBases{43, 47, 53, 59, 61, 67,
                                                              71, 73, 79, 83, 89, 97};

enum class Certainty { proven, probable };

struct Primality {
    bool prime = false;
    Certainty certainty = Certainty::proven;
};

inline std::string primality_policy(Certainty c) {
    return c == Certainty::proven ? "deterministic"
                                  : "strong-probable-prime(25 prime bases < 100)";
}

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t r = 1;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

// n odd, n > base
inline bool strong_probable_prime(std::uint64_t n, std::uint64_t base) {
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    std::uint64_t x = powmod(base, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

inline bool strong_probable_prime(const Integer& n, unsigned base) {
    Integer d = n - 1;
    const mp_bitcnt_t s = mpz_scan1(d.get_mpz_t(), 0);
    mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
    const Integer n_minus_1 = n - 1;
    Integer x;
    const Integer b = base;
    mpz_powm(x.get_mpz_t(), b.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n_minus_1) return true;
    for (mp_bitcnt_t i = 1; i < s; ++i) {
        x = x * x % n;
        if (x == n_minus_1) return true;
    }
    return false;
}

}  // namespace detail

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (unsigned p : kDeterministicBases) {
        if (n % p == 0) return n == p;
    }
    if (n < 43 * 43) return true;
    for (std::uint64_t base : kDeterministicBases) {
        if (!detail::strong_probable_prime(n, base)) return false;
    }
    return true;
}

/// Primality with the witness policy that decided it.
inline Primality primality(const Integer& n) {
    if (n < 2) return {false, Certainty::proven};
    if (fits_u64(n)) return {is_prime(to_u64(n)), Certainty::proven};
    for (unsigned p : kDeterministicBases) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return {false, Certainty::proven};
    }
    for (unsigned base : kDeterministicBases) {
        if (!detail::strong_probable_prime(n, base)) return {false, Certainty::proven};
    }
    if (n < deterministic_bound()) return {true, Certainty::proven};
    for (unsigned base : kProbableExtraBases) {
        if (!detail::strong_probable_prime(n, base)) return {false, Certainty::proven};
    }
    return {true, Certainty::probable};
}

inline bool is_prime(const Integer& n) { return primality(n).prime; }

/// Primes up to `limit` by the sieve of Eratosthenes.
inline std::vector<std::uint32_t> primes_up_to(std::uint32_t limit) {
    std::vector<std::uint32_t> primes;
    if (limit < 2) return primes;
    std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        primes.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return primes;
}

/// Shared table of the primes below the default trial-division bound.
inline const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> table =
        primes_up_to(static_cast<std::uint32_t>(kDefaultTrialBound));
    return table;
}

// ---------------------------------------------------------------------------
// Factorization
// ---------------------------------------------------------------------------

struct PrimePower {
    Natural prime;
    unsigned exponent = 0;

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// n = prod p^e with primes strictly ascending; empty for n = 1.
struct Factorization {
    std::vector<PrimePower> factors;
    // Set when some listed prime is only a strong probable prime.
    bool probable = false;

    friend bool operator==(const Factorization& x, const Factorization& y) {
        return x.factors == y.factors;
    }

    Natural value() const {
        Natural n = 1;
        for (const auto& [p, e] : factors) {
            Natural pe;
            mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
            n *= pe;
        }
        return n;
    }

    std::size_t omega() const { return factors.size(); }
};

namespace detail {

inline void push_factor(Factorization& f, const Natural& p, unsigned e) {
    f.factors.push_back({p, e});
}

inline Factorization factorize_u64(std::uint64_t n, std::uint64_t bound) {
    Factorization f;
    if (n == 1) return f;
    if (is_prime(n)) {
        push_factor(f, from_u64(n), 1);
        return f;
    }
    const auto& table = small_primes();
    std::vector<std::uint32_t> wider;
    const std::vector<std::uint32_t>* primes = &table;
    if (bound > kDefaultTrialBound) {
        wider = primes_up_to(static_cast<std::uint32_t>(std::min<std::uint64_t>(bound, 0xFFFFFFFFu)));
        primes = &wider;
    }
    std::uint64_t rem = n;
    bool exhausted = true;
    for (std::uint32_t p : *primes) {
        if (p > bound) break;
        if (static_cast<std::uint64_t>(p) * p > rem) {
            exhausted = false;
            break;
        }
        if (rem % p != 0) continue;
        unsigned e = 0;
        while (rem % p == 0) {
            rem /= p;
            ++e;
        }
        push_factor(f, from_u64(p), e);
        if (rem > 1 && is_prime(rem)) {
            push_factor(f, from_u64(rem), 1);
            return f;
        }
    }
    if (rem == 1) return f;
    if (!exhausted || is_prime(rem)) {
        push_factor(f, from_u64(rem), 1);
        return f;
    }
    throw resource_limit_error("composite cofactor " + std::to_string(rem) +
                               " exceeds trial-division bound " + std::to_string(bound));
}

}  // namespace detail

/// Trial division up to `bound`, then a primality check on the cofactor.
/// Throws resource_limit_error when a composite cofactor is left over.
inline Factorization factorize(const Natural& n, std::uint64_t bound = kDefaultTrialBound) {
    if (n < 1) throw precondition_error("factorize requires n >= 1");
    if (fits_u64(n)) return detail::factorize_u64(to_u64(n), bound);

    Factorization f;
    Natural rem = n;
    const auto primes = bound > kDefaultTrialBound
                            ? primes_up_to(static_cast<std::uint32_t>(std::min<std::uint64_t>(bound, 0xFFFFFFFFu)))
                            : small_primes();
    for (std::uint32_t p : primes) {
        if (p > bound) break;
        if (fits_u64(rem)) {
            // Finish on the native path, keeping the primes found so far.
            if (rem == 1) return f;
            Factorization tail = detail::factorize_u64(to_u64(rem), bound);
            for (auto& pp : tail.factors) f.factors.push_back(std::move(pp));
            return f;
        }
        if (!mpz_divisible_ui_p(rem.get_mpz_t(), p)) continue;
        unsigned e = 0;
        while (mpz_divisible_ui_p(rem.get_mpz_t(), p)) {
            mpz_divexact_ui(rem.get_mpz_t(), rem.get_mpz_t(), p);
            ++e;
        }
        detail::push_factor(f, from_u64(p), e);
        if (rem > 1) {
            const auto pr = primality(rem);
            if (pr.prime) {
                f.probable = f.probable || pr.certainty == Certainty::probable;
                detail::push_factor(f, rem, 1);
                return f;
            }
        }
    }
    // The final division may have brought rem into native range.
    if (fits_u64(rem)) {
        Factorization tail = detail::factorize_u64(to_u64(rem), bound);
        for (auto& pp : tail.factors) f.factors.push_back(std::move(pp));
        return f;
    }
    const auto pr = primality(rem);
    if (pr.prime) {
        f.probable = f.probable || pr.certainty == Certainty::probable;
        detail::push_factor(f, rem, 1);
        return f;
    }
    throw resource_limit_error("composite cofactor " + rem.get_str() +
                               " exceeds trial-division bound " + std::to_string(bound));
}

// ---------------------------------------------------------------------------
// Divisor sums, roots, valuations
// ---------------------------------------------------------------------------

/// 1 + q + ... + q^a = (q^{a+1} - 1) / (q - 1).
inline Natural sigma_prime_power(const Natural& q, unsigned a) {
    if (q < 2) throw precondition_error("sigma_prime_power requires q >= 2");
    Natural top;
    mpz_pow_ui(top.get_mpz_t(), q.get_mpz_t(), a + 1);
    top -= 1;
    const Natural den = q - 1;
    if (!mpz_divisible_p(top.get_mpz_t(), den.get_mpz_t())) {
        throw consistency_error("q - 1 does not divide q^(a+1) - 1");
    }
    Natural r;
    mpz_divexact(r.get_mpz_t(), top.get_mpz_t(), den.get_mpz_t());
    return r;
}

inline Natural sigma(const Factorization& f) {
    Natural s = 1;
    for (const auto& [p, e] : f.factors) s *= sigma_prime_power(p, e);
    return s;
}

inline Natural sigma(const Natural& n) { return sigma(factorize(n)); }

inline std::optional<Natural> isqrt_exact(const Natural& n) {
    if (n < 0) throw precondition_error("isqrt_exact of a negative integer");
    Natural root, rem;
    mpz_sqrtrem(root.get_mpz_t(), rem.get_mpz_t(), n.get_mpz_t());
    if (rem != 0) return std::nullopt;
    return root;
}

inline Natural gcd(const Natural& a, const Natural& b) {
    Natural g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

/// Exponent of the prime p in the nonzero integer x.
inline long vp(const Natural& p, const Integer& x) {
    if (x == 0) throw precondition_error("valuation of zero is infinite");
    if (!is_prime(p)) throw precondition_error("valuation base " + p.get_str() + " is not prime");
    if (p == 2) return static_cast<long>(mpz_scan1(x.get_mpz_t(), 0));
    Integer tmp;
    return static_cast<long>(mpz_remove(tmp.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t()));
}

/// vp(numerator) - vp(denominator).
inline long vp(const Natural& p, const Rational& x) {
    if (x == 0) throw precondition_error("valuation of zero is infinite");
    return vp(p, Integer(x.get_num())) - vp(p, Integer(x.get_den()));
}

inline long v2(const Integer& x) { return vp(Natural(2), x); }
inline long v2(const Rational& x) { return vp(Natural(2), x); }
inline long v2(std::uint64_t x) {
    if (x == 0) throw precondition_error("valuation of zero is infinite");
    return __builtin_ctzll(x);
}

/// Multiplicative formula; every partial product C(n-k+i, i) is an integer.
inline Natural binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    Natural r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r *= from_u64(n - k + i);
        mpz_divexact(r.get_mpz_t(), r.get_mpz_t(), from_u64(i).get_mpz_t());
    }
    return r;
}

inline Integer ipow(const Integer& base, unsigned long exp) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
    return r;
}

}  // namespace opnum
