#pragma once

// Range sweeps over the algebraic lemmas, shared by the CLI and the tests.

#include <cstdint>
#include <string>
#include <vector>

#include "opnum/arith.hpp"
#include "opnum/quad_order.hpp"

namespace opnum {

struct SweepResult {
    std::uint64_t checked = 0;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
};

/// trace((1 + sqrt(d))^m) = trace((1 - sqrt(d))^m) = trace_expansion(m, d)
/// for d = 1 - q, q prime <= q_max, 1 <= m <= m_max.
inline SweepResult sweep_trace(std::uint64_t m_max, std::uint32_t q_max) {
    SweepResult r;
    for (std::uint32_t q : primes_up_to(q_max)) {
        const Integer d = 1 - Integer(q);
        const QuadInt plus{d, 1, 1};
        const QuadInt minus{d, 1, -1};
        QuadInt pp = QuadInt::one(d);
        QuadInt pm = QuadInt::one(d);
        for (std::uint64_t m = 1; m <= m_max; ++m) {
            pp = mul(pp, plus);
            pm = mul(pm, minus);
            const Integer expected = trace_expansion(m, d);
            ++r.checked;
            if (trace(pp) != expected || trace(pm) != expected) {
                r.failures.push_back("trace q=" + std::to_string(q) + " m=" + std::to_string(m));
            }
        }
    }
    return r;
}

/// ratio_identity_check(m, i) for 4 <= m <= m_max, 2 <= i <= m/2.
inline SweepResult sweep_ratio(std::uint64_t m_max) {
    SweepResult r;
    for (std::uint64_t m = 4; m <= m_max; ++m) {
        for (std::uint64_t i = 2; 2 * i <= m; ++i) {
            ++r.checked;
            if (!ratio_identity_check(m, i)) {
                r.failures.push_back("ratio m=" + std::to_string(m) + " i=" + std::to_string(i));
            }
        }
    }
    return r;
}

/// gcd(q^m - 1, q^m + 1) = 2 for odd 3 <= q <= q_max, 1 <= m <= m_max.
inline SweepResult sweep_gcd(std::uint64_t q_max, std::uint64_t m_max) {
    SweepResult r;
    for (std::uint64_t q = 3; q <= q_max; q += 2) {
        Integer qm = 1;
        const Integer qz = from_u64(q);
        for (std::uint64_t m = 1; m <= m_max; ++m) {
            qm *= qz;
            ++r.checked;
            if (gcd(Integer(qm - 1), Integer(qm + 1)) != 2) {
                r.failures.push_back("gcd q=" + std::to_string(q) + " m=" + std::to_string(m));
            }
        }
    }
    return r;
}

/// two_adic_certificate for every prime q = 1 mod 4 up to q_max and odd
/// alpha in [3, alpha_max].
inline SweepResult sweep_certificates(std::uint32_t q_max, std::uint64_t alpha_max) {
    SweepResult r;
    for (std::uint32_t q : primes_up_to(q_max)) {
        if (q % 4 != 1) continue;
        for (std::uint64_t alpha = 3; alpha <= alpha_max; alpha += 2) {
            ++r.checked;
            if (!two_adic_certificate(from_u64(q), alpha).passed) {
                r.failures.push_back("certificate q=" + std::to_string(q) +
                                     " alpha=" + std::to_string(alpha));
            }
        }
    }
    return r;
}

}  // namespace opnum
