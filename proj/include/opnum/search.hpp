#pragma once

// Exhaustive search over primes q and exponents alpha for
//   2 n^2 = sigma(q^alpha)   (Equation::two_n_squared)
//     n^2 = sigma(q^alpha)   (Equation::n_squared)
// with deterministic, worker-count independent output and resumable
// checkpoints.

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "opnum/arith.hpp"
#include "opnum/json_io.hpp"
#include "opnum/quad_order.hpp"

namespace opnum {

enum class Equation { two_n_squared, n_squared };

inline std::string to_string(Equation e) {
    return e == Equation::two_n_squared ? "TWO_N_SQUARED" : "N_SQUARED";
}

inline Equation equation_from_string(const std::string& s) {
    if (s == "TWO_N_SQUARED") return Equation::two_n_squared;
    if (s == "N_SQUARED") return Equation::n_squared;
    throw precondition_error("unknown equation '" + s + "'");
}

struct SearchConfig {
    Equation equation = Equation::two_n_squared;
    std::uint64_t q_min = 2;
    std::uint64_t q_max = 50'000;
    unsigned alpha_min = 1;
    unsigned alpha_max = 25;
    std::optional<unsigned> residue_filter;  // q mod 4, 1 or 3
    unsigned worker_count = 1;
    std::optional<std::filesystem::path> checkpoint_path;

    void validate() const {
        if (q_min > q_max) throw precondition_error("q_min must not exceed q_max");
        if (alpha_min < 1) throw precondition_error("alpha_min must be at least 1");
        if (alpha_min > alpha_max) throw precondition_error("alpha_min must not exceed alpha_max");
        if (residue_filter && *residue_filter != 1 && *residue_filter != 3) {
            throw precondition_error("residue filter must be 1 or 3 (mod 4)");
        }
        if (worker_count < 1) throw precondition_error("worker_count must be positive");
    }

    /// Everything that determines the result set. Worker count and
    /// checkpoint location are deliberately absent.
    std::string canonical() const {
        return "equation=" + to_string(equation) + ";q_min=" + std::to_string(q_min) +
               ";q_max=" + std::to_string(q_max) + ";alpha_min=" + std::to_string(alpha_min) +
               ";alpha_max=" + std::to_string(alpha_max) +
               ";residue=" + (residue_filter ? std::to_string(*residue_filter) : "none");
    }

    std::string hash() const { return fnv1a_hex(canonical()); }
};

struct Split {
    Natural n1;
    Natural n2;
    friend bool operator==(const Split&, const Split&) = default;
};

struct SolutionRecord {
    Natural q;
    unsigned alpha = 0;
    Natural n;
    std::optional<Split> split;
    friend bool operator==(const SolutionRecord&, const SolutionRecord&) = default;
};

struct SearchStats {
    std::uint64_t scanned_primes = 0;
    std::uint64_t checked_pairs = 0;       // (q, alpha) pairs tested for squareness
    std::uint64_t skipped_even_alpha = 0;  // pairs dismissed by the parity law

    SearchStats& operator+=(const SearchStats& o) {
        scanned_primes += o.scanned_primes;
        checked_pairs += o.checked_pairs;
        skipped_even_alpha += o.skipped_even_alpha;
        return *this;
    }
    friend bool operator==(const SearchStats&, const SearchStats&) = default;
};

struct SearchResult {
    SearchConfig config;
    std::vector<SolutionRecord> hits;
    SearchStats stats;
    std::string config_hash;
    std::optional<std::uint64_t> last_completed_prime;
    bool complete = false;
};

/// Thrown when a checkpoint cannot be written mid-search. Carries everything
/// committed up to that point.
class search_io_error : public checkpoint_error {
public:
    search_io_error(const std::string& what, SearchResult partial)
        : checkpoint_error(what), partial_(std::move(partial)) {}
    const SearchResult& partial() const { return partial_; }

private:
    SearchResult partial_;
};

struct SearchControl {
    /// Called after each committed shard with the last q covered so far;
    /// returning true stops the search there, as an interruption would.
    std::function<bool(std::uint64_t covered_up_to)> should_stop;
    std::uint64_t shard_width = 2048;
};

// ---------------------------------------------------------------------------
// Factor splitting
// ---------------------------------------------------------------------------

/// For 2n^2 = sigma(q^alpha) with alpha odd and h = (alpha+1)/2, recovers the
/// coprime n1, n2 with (q-1) n1^2 = q^h - 1 and 2 n2^2 = q^h + 1.
inline Split split_solution(const Natural& q, unsigned alpha, const Natural& n) {
    if (alpha % 2 == 0) throw precondition_error("split_solution requires odd alpha");
    if (2 * n * n != sigma_prime_power(q, alpha)) {
        throw precondition_error("2n^2 != sigma(q^alpha) for q = " + q.get_str() +
                                 ", alpha = " + std::to_string(alpha) + ", n = " + n.get_str());
    }
    const Natural qh = ipow(q, (alpha + 1) / 2);
    const Natural minus = qh - 1;
    const Natural plus = qh + 1;
    const Natural qm1 = q - 1;
    auto fail = [&](const std::string& why) {
        return consistency_error("splitting lemma fails for q = " + q.get_str() +
                                 ", alpha = " + std::to_string(alpha) + ": " + why);
    };
    if (!mpz_divisible_p(minus.get_mpz_t(), qm1.get_mpz_t())) throw fail("q-1 does not divide q^h-1");
    if (!mpz_divisible_2exp_p(plus.get_mpz_t(), 1)) throw fail("q^h+1 is odd");
    const auto n1 = isqrt_exact(Natural(minus / qm1));
    if (!n1) throw fail("(q^h-1)/(q-1) is not a square");
    const auto n2 = isqrt_exact(Natural(plus / 2));
    if (!n2) throw fail("(q^h+1)/2 is not a square");
    if (gcd(*n1, *n2) != 1) throw fail("n1 and n2 are not coprime");
    if (*n1 * *n2 != n) throw fail("n1*n2 != n");
    return {*n1, *n2};
}

/// Hits that a nonexistence theorem rules out: q = 1 mod 4 with alpha > 1 for
/// 2n^2 = sigma(q^alpha), and q = 1 mod 4 with any alpha for n^2 = sigma(q^alpha).
inline std::vector<SolutionRecord> theorem_violations(Equation eq,
                                                      const std::vector<SolutionRecord>& hits) {
    std::vector<SolutionRecord> bad;
    for (const auto& h : hits) {
        if (mpz_fdiv_ui(h.q.get_mpz_t(), 4) != 1) continue;
        if (eq == Equation::n_squared || h.alpha > 1) bad.push_back(h);
    }
    return bad;
}

namespace detail {

struct ShardResult {
    std::vector<SolutionRecord> hits;
    SearchStats stats;
    std::optional<std::uint64_t> last_prime;
};

inline ShardResult scan_shard(const SearchConfig& cfg, std::uint64_t lo, std::uint64_t hi) {
    ShardResult out;
    Natural power;
    Natural sum;
    Natural half;
    for (std::uint64_t q = lo;; ++q) {
        if ((!cfg.residue_filter || q % 4 == *cfg.residue_filter) && is_prime(q)) {
            out.last_prime = q;
            ++out.stats.scanned_primes;
            const Natural qz = from_u64(q);
            // sigma(q^alpha) accumulated one power at a time.
            power = 1;
            sum = 1;
            for (unsigned alpha = 1; alpha <= cfg.alpha_max; ++alpha) {
                power *= qz;
                sum += power;
                if (alpha < cfg.alpha_min) continue;
                if (cfg.equation == Equation::two_n_squared) {
                    if (alpha % 2 == 0) {
                        // sigma(q^alpha) has alpha+1 terms and is odd.
                        ++out.stats.skipped_even_alpha;
                        continue;
                    }
                    ++out.stats.checked_pairs;
                    if (mpz_odd_p(sum.get_mpz_t())) continue;
                    mpz_tdiv_q_2exp(half.get_mpz_t(), sum.get_mpz_t(), 1);
                    if (auto n = isqrt_exact(half)) {
                        out.hits.push_back({qz, alpha, *n, split_solution(qz, alpha, *n)});
                    }
                } else {
                    ++out.stats.checked_pairs;
                    if (auto n = isqrt_exact(sum)) out.hits.push_back({qz, alpha, *n, std::nullopt});
                }
            }
        }
        if (q == hi) break;
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline json to_json(const SearchConfig& cfg) {
    json j;
    j["equation"] = to_string(cfg.equation);
    j["q_min"] = cfg.q_min;
    j["q_max"] = cfg.q_max;
    j["alpha_min"] = cfg.alpha_min;
    j["alpha_max"] = cfg.alpha_max;
    j["residue_filter"] = cfg.residue_filter ? json(*cfg.residue_filter) : json(nullptr);
    return j;
}

inline SearchConfig search_config_from_json(const json& j) {
    SearchConfig cfg;
    cfg.equation = equation_from_string(j.at("equation").get<std::string>());
    cfg.q_min = j.at("q_min").get<std::uint64_t>();
    cfg.q_max = j.at("q_max").get<std::uint64_t>();
    cfg.alpha_min = j.at("alpha_min").get<unsigned>();
    cfg.alpha_max = j.at("alpha_max").get<unsigned>();
    if (!j.at("residue_filter").is_null()) cfg.residue_filter = j.at("residue_filter").get<unsigned>();
    return cfg;
}

inline json to_json(Equation eq, const SolutionRecord& r) {
    json j;
    j["equation"] = to_string(eq);
    j["q"] = integer_to_json(r.q);
    j["alpha"] = r.alpha;
    j["n"] = integer_to_json(r.n);
    j["n1"] = r.split ? integer_to_json(r.split->n1) : json(nullptr);
    j["n2"] = r.split ? integer_to_json(r.split->n2) : json(nullptr);
    return j;
}

inline SolutionRecord solution_from_json(const json& j) {
    SolutionRecord r;
    r.q = integer_from_json(j.at("q"));
    r.alpha = j.at("alpha").get<unsigned>();
    r.n = integer_from_json(j.at("n"));
    if (!j.at("n1").is_null()) r.split = Split{integer_from_json(j.at("n1")), integer_from_json(j.at("n2"))};
    return r;
}

inline json summary_json(const SearchResult& res) {
    json j;
    j["scanned_primes"] = res.stats.scanned_primes;
    j["checked_pairs"] = res.stats.checked_pairs;
    j["skipped_even_alpha"] = res.stats.skipped_even_alpha;
    j["hits"] = res.hits.size();
    j["config_hash"] = res.config_hash;
    // q is bounded by 2^64, well inside the deterministic Miller-Rabin range.
    j["primality"] = primality_policy(Certainty::proven);
    return j;
}

/// One line per hit, then the summary line.
inline void write_jsonl(std::ostream& os, const SearchResult& res) {
    for (const auto& h : res.hits) os << to_json(res.config.equation, h).dump() << '\n';
    os << summary_json(res).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

struct CheckpointState {
    SearchConfig config;
    std::string config_hash;
    std::optional<std::uint64_t> last_completed_prime;
    std::vector<SolutionRecord> partial_hits;
    SearchStats stats;

    /// First q the resumed search still has to look at.
    std::uint64_t cursor() const {
        return last_completed_prime ? std::max(config.q_min, *last_completed_prime + 1) : config.q_min;
    }
};

inline json to_json(const CheckpointState& st) {
    json hits = json::array();
    for (const auto& h : st.partial_hits) hits.push_back(to_json(st.config.equation, h));
    json j;
    j["config_hash"] = st.config_hash;
    j["last_completed_prime"] = st.last_completed_prime ? json(*st.last_completed_prime) : json(nullptr);
    j["partial_hits"] = std::move(hits);
    j["config"] = to_json(st.config);
    j["stats"] = {{"scanned_primes", st.stats.scanned_primes},
                  {"checked_pairs", st.stats.checked_pairs},
                  {"skipped_even_alpha", st.stats.skipped_even_alpha}};
    return j;
}

/// Writes to a sibling temporary file and renames it over `path`, so a crash
/// never leaves a truncated checkpoint behind.
inline void checkpoint_save(const std::filesystem::path& path, const CheckpointState& st) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw checkpoint_error("cannot open " + tmp.string() + " for writing");
        out << to_json(st).dump() << '\n';
        out.flush();
        if (!out) throw checkpoint_error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw checkpoint_error("cannot move checkpoint into " + path.string() + ": " + ec.message());
}

/// Reads a checkpoint; the file is never modified. Returns nullopt if it does
/// not exist (a fresh search starts at q_min).
inline std::optional<CheckpointState> checkpoint_resume(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw checkpoint_error("cannot open checkpoint " + path.string());
    try {
        const json j = json::parse(in);
        CheckpointState st;
        st.config = search_config_from_json(j.at("config"));
        st.config_hash = j.at("config_hash").get<std::string>();
        if (st.config_hash != st.config.hash()) {
            throw checkpoint_error("checkpoint " + path.string() + " is internally inconsistent");
        }
        if (!j.at("last_completed_prime").is_null()) {
            st.last_completed_prime = j.at("last_completed_prime").get<std::uint64_t>();
        }
        for (const auto& h : j.at("partial_hits")) st.partial_hits.push_back(solution_from_json(h));
        const auto& s = j.at("stats");
        st.stats.scanned_primes = s.at("scanned_primes").get<std::uint64_t>();
        st.stats.checked_pairs = s.at("checked_pairs").get<std::uint64_t>();
        st.stats.skipped_even_alpha = s.at("skipped_even_alpha").get<std::uint64_t>();
        return st;
    } catch (const checkpoint_error&) {
        throw;
    } catch (const std::exception& e) {
        throw checkpoint_error("corrupt checkpoint " + path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Coordinator
// ---------------------------------------------------------------------------

/// Runs the configured search. The q range is cut into contiguous shards;
/// workers scan shards in any order but results are committed strictly in
/// shard order, so the output never depends on worker_count. With a
/// checkpoint path the committed prefix is persisted after every shard and an
/// existing checkpoint for the same config is resumed.
inline SearchResult run_search(const SearchConfig& cfg, const SearchControl& control = {}) {
    cfg.validate();
    if (control.shard_width == 0) throw precondition_error("shard width must be positive");

    SearchResult res;
    res.config = cfg;
    res.config_hash = cfg.hash();

    std::uint64_t cursor = cfg.q_min;
    if (cfg.checkpoint_path) {
        if (auto st = checkpoint_resume(*cfg.checkpoint_path)) {
            if (st->config_hash != res.config_hash) {
                throw checkpoint_error("checkpoint " + cfg.checkpoint_path->string() +
                                       " belongs to config " + st->config_hash + ", not " +
                                       res.config_hash);
            }
            res.hits = std::move(st->partial_hits);
            res.stats = st->stats;
            res.last_completed_prime = st->last_completed_prime;
            cursor = st->cursor();
        }
    }
    if (cursor > cfg.q_max) {
        res.complete = true;
        return res;
    }

    struct Shard {
        std::uint64_t lo;
        std::uint64_t hi;
    };
    std::vector<Shard> shards;
    for (std::uint64_t lo = cursor;;) {
        const std::uint64_t room = cfg.q_max - lo;
        const std::uint64_t hi = room < control.shard_width ? cfg.q_max : lo + control.shard_width - 1;
        shards.push_back({lo, hi});
        if (hi == cfg.q_max) break;
        lo = hi + 1;
    }

    struct Slot {
        std::optional<detail::ShardResult> result;
        std::exception_ptr error;
    };
    std::vector<Slot> slots(shards.size());
    std::mutex mu;
    std::condition_variable ready;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> cancel{false};

    auto work = [&] {
        for (;;) {
            if (cancel.load()) return;
            const std::size_t idx = next.fetch_add(1);
            if (idx >= shards.size()) return;
            Slot slot;
            try {
                slot.result = detail::scan_shard(cfg, shards[idx].lo, shards[idx].hi);
            } catch (...) {
                slot.error = std::current_exception();
            }
            {
                std::lock_guard lock(mu);
                slots[idx] = std::move(slot);
            }
            ready.notify_all();
        }
    };

    const std::size_t n_threads = std::min<std::size_t>(cfg.worker_count, shards.size());
    std::vector<std::jthread> pool;
    if (n_threads > 1) {
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
    }
    auto stop_pool = [&] {
        cancel.store(true);
        pool.clear();  // joins
    };

    for (std::size_t idx = 0; idx < shards.size(); ++idx) {
        Slot slot;
        if (n_threads > 1) {
            std::unique_lock lock(mu);
            ready.wait(lock, [&] { return slots[idx].result || slots[idx].error; });
            slot = std::move(slots[idx]);
        } else {
            try {
                slot.result = detail::scan_shard(cfg, shards[idx].lo, shards[idx].hi);
            } catch (...) {
                slot.error = std::current_exception();
            }
        }
        if (slot.error) {
            stop_pool();
            std::rethrow_exception(slot.error);
        }

        auto& shard = *slot.result;
        for (auto& h : shard.hits) res.hits.push_back(std::move(h));
        res.stats += shard.stats;
        if (shard.last_prime) res.last_completed_prime = shard.last_prime;

        if (cfg.checkpoint_path) {
            CheckpointState st{cfg, res.config_hash, res.last_completed_prime, res.hits, res.stats};
            try {
                checkpoint_save(*cfg.checkpoint_path, st);
            } catch (const checkpoint_error& e) {
                stop_pool();
                throw search_io_error(e.what(), res);
            }
        }
        if (idx + 1 < shards.size() && control.should_stop && control.should_stop(shards[idx].hi)) {
            stop_pool();
            return res;
        }
    }
    stop_pool();
    res.complete = true;
    return res;
}

inline SearchResult search_two_n_squared(const SearchConfig& cfg, const SearchControl& control = {}) {
    if (cfg.equation != Equation::two_n_squared) {
        throw precondition_error("search_two_n_squared needs equation TWO_N_SQUARED");
    }
    return run_search(cfg, control);
}

inline SearchResult search_n_squared(const SearchConfig& cfg, const SearchControl& control = {}) {
    if (cfg.equation != Equation::n_squared) {
        throw precondition_error("search_n_squared needs equation N_SQUARED");
    }
    return run_search(cfg, control);
}

}  // namespace opnum
