#pragma once

// Classification of integers against the structure theorems for (multiply)
// perfect numbers: abundancy, Euler form, DHP decomposition, and the 2-adic
// bookkeeping of sigma for odd n.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opnum/arith.hpp"
#include "opnum/json_io.hpp"

namespace opnum {

// ---------------------------------------------------------------------------
// Segmented sigma sieve
// ---------------------------------------------------------------------------

/// Calls fn(n, sigma(n)) for every n in [lo, hi] in ascending order. Works on
/// segments of `segment` integers, dividing out each prime up to sqrt(hi), so
/// memory stays O(segment + sqrt(hi)).
template <typename Fn>
void for_each_sigma(std::uint64_t lo, std::uint64_t hi, Fn&& fn, std::uint64_t segment = 1u << 18) {
    if (lo < 1) lo = 1;
    if (hi < lo) return;
    if (hi > (std::uint64_t{1} << 40)) throw precondition_error("sigma sieve limited to 2^40");
    std::uint64_t root = 1;
    while ((root + 1) * (root + 1) <= hi) ++root;
    const auto base = primes_up_to(static_cast<std::uint32_t>(root));

    std::vector<std::uint64_t> rem(segment);
    std::vector<std::uint64_t> sig(segment);
    for (std::uint64_t start = lo; start <= hi; start += segment) {
        const std::uint64_t stop = std::min(hi, start + segment - 1);
        const std::size_t len = static_cast<std::size_t>(stop - start + 1);
        for (std::size_t i = 0; i < len; ++i) {
            rem[i] = start + i;
            sig[i] = 1;
        }
        for (std::uint64_t p : base) {
            if (p * p > stop) break;
            for (std::uint64_t m = (start + p - 1) / p * p; m <= stop; m += p) {
                const std::size_t i = static_cast<std::size_t>(m - start);
                std::uint64_t term = 1;
                std::uint64_t acc = 1;
                while (rem[i] % p == 0) {
                    rem[i] /= p;
                    term *= p;
                    acc += term;
                }
                sig[i] *= acc;
            }
        }
        for (std::size_t i = 0; i < len; ++i) {
            if (rem[i] > 1) sig[i] *= rem[i] + 1;
            fn(start + i, sig[i]);
        }
    }
}

// ---------------------------------------------------------------------------
// Abundancy and multiperfect numbers
// ---------------------------------------------------------------------------

struct Abundancy {
    Natural sigma;
    std::optional<Natural> k;  // present iff sigma = k n
};

inline Abundancy abundancy(const Natural& n) {
    if (n < 1) throw precondition_error("abundancy requires n >= 1");
    Abundancy a{sigma(n), std::nullopt};
    if (mpz_divisible_p(a.sigma.get_mpz_t(), n.get_mpz_t())) a.k = Natural(a.sigma / n);
    return a;
}

struct Multiperfect {
    std::uint64_t n;
    std::uint64_t k;
    friend bool operator==(const Multiperfect&, const Multiperfect&) = default;
};

inline std::vector<Multiperfect> enumerate_multiperfect(std::uint64_t limit) {
    if (limit < 1) throw precondition_error("enumerate_multiperfect requires limit >= 1");
    std::vector<Multiperfect> out;
    for_each_sigma(1, limit, [&](std::uint64_t n, std::uint64_t s) {
        if (s % n == 0) out.push_back({n, s / n});
    });
    return out;
}

// ---------------------------------------------------------------------------
// Euler form and DHP decomposition
// ---------------------------------------------------------------------------

struct EulerForm {
    Natural n0;
    Natural q;
    unsigned alpha;
    friend bool operator==(const EulerForm&, const EulerForm&) = default;
};

/// n = n0^2 q^alpha with q the single prime of odd exponent and
/// q = alpha = 1 mod 4.
inline std::optional<EulerForm> euler_form(const Natural& n) {
    if (n < 1 || mpz_even_p(n.get_mpz_t())) throw precondition_error("euler_form requires odd n >= 1");
    const Factorization f = factorize(n);
    const PrimePower* special = nullptr;
    for (const auto& pp : f.factors) {
        if (pp.exponent % 2 == 0) continue;
        if (special) return std::nullopt;
        special = &pp;
    }
    if (!special) return std::nullopt;
    if (mpz_fdiv_ui(special->prime.get_mpz_t(), 4) != 1 || special->exponent % 4 != 1) return std::nullopt;
    const Natural rest = n / ipow(special->prime, special->exponent);
    const auto n0 = isqrt_exact(rest);
    if (!n0) throw consistency_error("cofactor of the Euler prime is not a square");
    return EulerForm{*n0, special->prime, special->exponent};
}

struct DhpDecomposition {
    Natural m;
    Natural q;
    unsigned alpha;
    friend bool operator==(const DhpDecomposition&, const DhpDecomposition&) = default;
};

/// Smallest prime q with q^alpha || n and sigma(n / q^alpha) = q^alpha.
inline std::optional<DhpDecomposition> dhp_decompose(const Natural& n) {
    if (n < 2) throw precondition_error("dhp_decompose requires n >= 2");
    const Factorization f = factorize(n);
    for (const auto& [q, alpha] : f.factors) {
        const Natural qa = ipow(q, alpha);
        const Natural m = n / qa;
        // m inherits the rest of n's factorization, so sigma(m) needs no refactoring.
        Natural sm = 1;
        for (const auto& pp : f.factors) {
            if (pp.prime != q) sm *= sigma_prime_power(pp.prime, pp.exponent);
        }
        if (sm == qa) return DhpDecomposition{m, q, alpha};
    }
    return std::nullopt;
}

/// 2^(p-1) (2^p - 1) with 2^p - 1 prime.
inline bool is_even_perfect(const Natural& n) {
    if (n < 6 || mpz_odd_p(n.get_mpz_t())) return false;
    const auto t = mpz_scan1(n.get_mpz_t(), 0);
    Natural odd;
    mpz_tdiv_q_2exp(odd.get_mpz_t(), n.get_mpz_t(), t);
    Natural mersenne;
    mpz_ui_pow_ui(mersenne.get_mpz_t(), 2, t + 1);
    mersenne -= 1;
    return odd == mersenne && is_prime(mersenne);
}

/// Multiperfect n in [2, limit] admitting a DHP decomposition.
inline std::vector<std::uint64_t> dhp_scan(std::uint64_t limit) {
    if (limit < 2) throw precondition_error("dhp_scan requires limit >= 2");
    std::vector<std::uint64_t> out;
    for (const auto& [n, k] : enumerate_multiperfect(limit)) {
        if (n >= 2 && dhp_decompose(from_u64(n))) out.push_back(n);
    }
    return out;
}

// ---------------------------------------------------------------------------
// 2-adic bookkeeping of sigma(n) for odd n
// ---------------------------------------------------------------------------

struct ChenLuoEntry {
    Natural p;
    unsigned alpha;
    long a;  // v2(p + 1) - 1, so p = 2^(a+1) - 1 mod 2^(a+2)
    long b;  // v2(alpha + 1) - 1, so alpha = 2^(b+1) - 1 mod 2^(b+2)
};

struct ChenLuoRecord {
    std::uint64_t s = 0;  // primes with odd exponent
    std::vector<ChenLuoEntry> entries;
    long v2_sigma = 0;    // computed from sigma(n) directly
    long formula = 0;     // s + sum a + sum b
};

/// For odd n, v2(sigma(p^e)) is 0 for even e and v2(p+1) + v2(e+1) - 1 for
/// odd e, so v2(sigma(n)) = s + sum a_i + sum b_i. Both sides are computed
/// and must agree.
inline ChenLuoRecord chenluo_check(const Natural& n) {
    if (n < 3 || mpz_even_p(n.get_mpz_t())) throw precondition_error("chenluo_check requires odd n >= 3");
    const Factorization f = factorize(n);
    ChenLuoRecord rec;
    for (const auto& [p, e] : f.factors) {
        if (e % 2 == 0) continue;
        ++rec.s;
        const long a = v2(Integer(p + 1)) - 1;
        const long b = v2(std::uint64_t{e} + 1) - 1;
        rec.entries.push_back({p, e, a, b});
        rec.formula += 1 + a + b;
    }
    rec.v2_sigma = v2(sigma(f));
    if (rec.v2_sigma != rec.formula) {
        throw consistency_error("v2(sigma(" + n.get_str() + ")) = " + std::to_string(rec.v2_sigma) +
                                " but the valuation formula gives " + std::to_string(rec.formula));
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Lower bound for sigma(n^2)/q
// ---------------------------------------------------------------------------

/// prod sigma(p^2) = prod (p^2 + p + 1) over the first `count` odd primes.
inline Natural omega_bound_product(unsigned count) {
    if (count < 1 || count > 1000) throw precondition_error("count must be in [1, 1000]");
    Natural prod = 1;
    unsigned used = 0;
    for (std::uint32_t p : small_primes()) {
        if (p == 2) continue;
        prod *= sigma_prime_power(from_u64(p), 2);
        if (++used == count) break;
    }
    return prod;
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct ClassifyReport {
    Natural n;
    Natural sigma;
    std::optional<Natural> k;
    std::optional<EulerForm> euler;
    std::optional<DhpDecomposition> dhp;
    std::optional<ChenLuoRecord> chenluo;
};

inline ClassifyReport classify(const Natural& n) {
    ClassifyReport r;
    r.n = n;
    auto ab = abundancy(n);
    r.sigma = std::move(ab.sigma);
    r.k = std::move(ab.k);
    const bool odd = mpz_odd_p(n.get_mpz_t());
    if (odd) r.euler = euler_form(n);
    if (n >= 2) r.dhp = dhp_decompose(n);
    if (odd && n >= 3) r.chenluo = chenluo_check(n);
    return r;
}

inline json to_json(const ClassifyReport& r) {
    json j;
    j["n"] = integer_to_json(r.n);
    j["sigma"] = integer_to_json(r.sigma);
    j["k"] = r.k ? integer_to_json(*r.k) : json(nullptr);
    if (r.euler) {
        j["euler_form"] = {{"n0", integer_to_json(r.euler->n0)},
                           {"q", integer_to_json(r.euler->q)},
                           {"alpha", r.euler->alpha}};
    } else {
        j["euler_form"] = nullptr;
    }
    if (r.dhp) {
        j["dhp"] = {{"m", integer_to_json(r.dhp->m)},
                    {"q", integer_to_json(r.dhp->q)},
                    {"alpha", r.dhp->alpha}};
    } else {
        j["dhp"] = nullptr;
    }
    if (r.chenluo) {
        json entries = json::array();
        for (const auto& e : r.chenluo->entries) {
            entries.push_back({{"p", integer_to_json(e.p)}, {"alpha", e.alpha}, {"a", e.a}, {"b", e.b}});
        }
        j["chenluo"] = {{"s", r.chenluo->s},
                        {"entries", std::move(entries)},
                        {"v2_sigma", r.chenluo->v2_sigma}};
    } else {
        j["chenluo"] = nullptr;
    }
    return j;
}

}  // namespace opnum
