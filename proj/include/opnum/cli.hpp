#pragma once

// Batch command-line front end. `run` is the whole program minus signal
// wiring, so tests can drive it in-process.
//
// Exit codes:
//   0  success
//   1  usage error (unknown flag, malformed number, violated precondition)
//   2  theorem violation or failed consistency check
//   3  I/O or checkpoint error
//   4  stopped early; the checkpoint holds the committed prefix

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opnum/arith.hpp"
#include "opnum/classify.hpp"
#include "opnum/identities.hpp"
#include "opnum/json_io.hpp"
#include "opnum/quad_order.hpp"
#include "opnum/search.hpp"

namespace opnum::cli {

enum ExitCode : int { ok = 0, usage = 1, violation = 2, io = 3, stopped = 4 };

class usage_error : public error {
public:
    using error::error;
};

/// Decimal digits with optional single underscores between them ("50_000").
/// Signs, exponents and everything else are rejected.
inline Natural parse_decimal(const std::string& text, const std::string& flag) {
    std::string digits;
    bool prev_digit = false;
    for (char c : text) {
        if (c >= '0' && c <= '9') {
            digits += c;
            prev_digit = true;
        } else if (c == '_' && prev_digit) {
            prev_digit = false;
        } else {
            throw usage_error(flag + ": '" + text + "' is not a decimal integer");
        }
    }
    if (digits.empty() || !prev_digit) throw usage_error(flag + ": '" + text + "' is not a decimal integer");
    return Natural(digits);
}

inline std::uint64_t parse_u64(const std::string& text, const std::string& flag) {
    const Natural v = parse_decimal(text, flag);
    if (!fits_u64(v)) throw usage_error(flag + ": " + text + " exceeds 64 bits");
    return to_u64(v);
}

inline unsigned parse_uint(const std::string& text, const std::string& flag,
                           std::uint64_t lo = 0, std::uint64_t hi = 0xFFFFFFFFu) {
    const std::uint64_t v = parse_u64(text, flag);
    if (v < lo || v > hi) {
        throw usage_error(flag + ": " + text + " outside [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    }
    return static_cast<unsigned>(v);
}

struct Options {
    std::string format = "text";
    // search
    std::string equation = "2nsq";
    std::string q_min = "2";
    std::string q_max = "50000";
    std::string alpha_min = "1";
    std::string alpha_max = "25";
    std::string q_mod4;
    std::string jobs = "1";
    std::string checkpoint;
    std::string interrupt_after;
    std::string inject_hit;
    // certify
    std::string cert_q;
    std::string cert_alpha;
    std::string cert_q_max;
    std::string cert_alpha_max = "101";
    // classify
    std::string n;
    bool dhp_scan = false;
    bool multiperfect = false;
    bool chenluo_scan = false;
    std::string limit;
    // identity
    std::string kind = "all";
    std::string trace_m_max = "60";
    std::string trace_q_max = "200";
    std::string ratio_m_max = "200";
    std::string gcd_q_max = "1000";
    std::string gcd_m_max = "50";
    // bound
    std::string count = "8";
};

struct Context {
    std::ostream& out;
    std::ostream& err;
    const std::atomic<bool>* interrupted = nullptr;
    bool jsonl = false;
};

inline void print_hash_text(Context& ctx, const std::string& hash) {
    ctx.out << "config_hash: " << hash << '\n';
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

inline SearchConfig search_config(const Options& o) {
    SearchConfig cfg;
    if (o.equation == "2nsq") {
        cfg.equation = Equation::two_n_squared;
    } else if (o.equation == "nsq") {
        cfg.equation = Equation::n_squared;
    } else {
        throw usage_error("--equation must be 2nsq or nsq");
    }
    cfg.q_min = parse_u64(o.q_min, "--q-min");
    cfg.q_max = parse_u64(o.q_max, "--q-max");
    cfg.alpha_min = parse_uint(o.alpha_min, "--alpha-min", 1, 100'000);
    cfg.alpha_max = parse_uint(o.alpha_max, "--alpha-max", 1, 100'000);
    if (!o.q_mod4.empty()) cfg.residue_filter = parse_uint(o.q_mod4, "--q-mod4", 1, 3);
    cfg.worker_count = parse_uint(o.jobs, "--jobs", 1, 1024);
    try {
        cfg.validate();
    } catch (const precondition_error& e) {
        throw usage_error(e.what());
    }
    if (!o.checkpoint.empty()) {
        cfg.checkpoint_path = o.checkpoint;
    } else if (const char* dir = std::getenv("OPNUM_CHECKPOINT_DIR"); dir && *dir) {
        cfg.checkpoint_path = std::filesystem::path(dir) / ("search-" + cfg.hash() + ".json");
    }
    return cfg;
}

/// "q:alpha:n" appended to the results as if the search had found it.
inline SolutionRecord parse_injected_hit(const std::string& text) {
    const auto a = text.find(':');
    const auto b = text.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos) {
        throw usage_error("--inject-fake-hit expects q:alpha:n");
    }
    SolutionRecord r;
    r.q = parse_decimal(text.substr(0, a), "--inject-fake-hit");
    r.alpha = parse_uint(text.substr(a + 1, b - a - 1), "--inject-fake-hit", 1);
    r.n = parse_decimal(text.substr(b + 1), "--inject-fake-hit");
    return r;
}

inline int cmd_search(const Options& o, Context& ctx) {
    const SearchConfig cfg = search_config(o);
    SearchControl control;
    std::optional<std::uint64_t> stop_at;
    if (!o.interrupt_after.empty()) stop_at = parse_u64(o.interrupt_after, "--interrupt-after-q");
    control.should_stop = [&](std::uint64_t covered) {
        if (ctx.interrupted && ctx.interrupted->load()) return true;
        return stop_at && covered >= *stop_at;
    };
    std::optional<SolutionRecord> injected;
    if (!o.inject_hit.empty()) injected = parse_injected_hit(o.inject_hit);

    SearchResult res;
    try {
        res = run_search(cfg, control);
    } catch (const search_io_error& e) {
        ctx.err << "checkpoint write failed: " << e.what() << '\n';
        if (ctx.jsonl) write_jsonl(ctx.out, e.partial());
        return io;
    }

    if (!res.complete) {
        ctx.err << "stopped after q = " << (res.last_completed_prime ? *res.last_completed_prime : 0)
                << "; rerun with the same checkpoint to resume\n";
        return stopped;
    }
    if (injected) res.hits.push_back(*injected);

    if (ctx.jsonl) {
        write_jsonl(ctx.out, res);
    } else {
        ctx.out << "equation: " << to_string(cfg.equation) << '\n';
        print_hash_text(ctx, res.config_hash);
        ctx.out << "q alpha n n1 n2\n";
        for (const auto& h : res.hits) {
            ctx.out << h.q.get_str() << ' ' << h.alpha << ' ' << h.n.get_str() << ' '
                    << (h.split ? h.split->n1.get_str() : "-") << ' '
                    << (h.split ? h.split->n2.get_str() : "-") << '\n';
        }
        ctx.out << "scanned_primes: " << res.stats.scanned_primes << '\n'
                << "checked_pairs: " << res.stats.checked_pairs << '\n'
                << "skipped_even_alpha: " << res.stats.skipped_even_alpha << '\n'
                << "hits: " << res.hits.size() << '\n';
    }

    const auto bad = theorem_violations(cfg.equation, res.hits);
    for (const auto& h : bad) {
        ctx.err << "THEOREM VIOLATION: " << to_string(cfg.equation) << " hit q = " << h.q.get_str()
                << ", alpha = " << h.alpha << ", n = " << h.n.get_str() << '\n';
    }
    return bad.empty() ? ok : violation;
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

inline int cmd_certify(const Options& o, Context& ctx) {
    std::vector<std::pair<Natural, std::uint64_t>> jobs;
    std::string canonical = "certify;";
    if (!o.cert_q.empty() || !o.cert_alpha.empty()) {
        if (o.cert_q.empty() || o.cert_alpha.empty()) throw usage_error("--q and --alpha go together");
        const Natural q = parse_decimal(o.cert_q, "--q");
        const std::uint64_t alpha = parse_u64(o.cert_alpha, "--alpha");
        jobs.emplace_back(q, alpha);
        canonical += "q=" + q.get_str() + ";alpha=" + std::to_string(alpha);
    } else if (!o.cert_q_max.empty()) {
        const std::uint32_t q_max = parse_uint(o.cert_q_max, "--q-max", 5);
        const std::uint64_t alpha_max = parse_u64(o.cert_alpha_max, "--alpha-max");
        for (std::uint32_t q : primes_up_to(q_max)) {
            if (q % 4 != 1) continue;
            for (std::uint64_t alpha = 3; alpha <= alpha_max; alpha += 2) jobs.emplace_back(from_u64(q), alpha);
        }
        canonical += "q_max=" + std::to_string(q_max) + ";alpha_max=" + std::to_string(alpha_max);
    } else {
        throw usage_error("certify needs --q/--alpha or --q-max");
    }
    const std::string hash = fnv1a_hex(canonical);

    std::uint64_t failed = 0;
    if (!ctx.jsonl) print_hash_text(ctx, hash);
    for (const auto& [q, alpha] : jobs) {
        CertificateReport rep;
        try {
            rep = two_adic_certificate(q, alpha);
        } catch (const precondition_error& e) {
            throw usage_error(e.what());
        }
        if (!rep.passed) ++failed;
        if (ctx.jsonl) {
            ctx.out << to_json(rep).dump() << '\n';
        } else {
            ctx.out << "q=" << rep.q.get_str() << " alpha=" << rep.alpha
                    << " S=" << rational_to_string(rep.s) << " v2(S)=";
            if (rep.s_nonzero) ctx.out << rep.v2_total; else ctx.out << "inf";
            ctx.out << " summands=[";
            for (std::size_t k = 0; k < rep.summands.size(); ++k) {
                ctx.out << (k ? " " : "") << "i=" << rep.summands[k].i << ":v2=" << rep.summands[k].v2;
            }
            ctx.out << "] " << (rep.passed ? "PASS" : "FAIL") << '\n';
        }
    }
    if (ctx.jsonl) {
        json s;
        s["certificates"] = jobs.size();
        s["failed"] = failed;
        s["config_hash"] = hash;
        ctx.out << s.dump() << '\n';
    } else {
        ctx.out << "certificates: " << jobs.size() << " failed: " << failed << '\n';
    }
    if (failed) ctx.err << "THEOREM VIOLATION: " << failed << " certificate(s) failed\n";
    return failed ? violation : ok;
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

inline void write_list(std::ostream& os, const std::vector<std::uint64_t>& v) {
    json a = json::array();
    for (auto x : v) a.push_back(x);
    os << a.dump() << '\n';
}

inline int cmd_classify(const Options& o, Context& ctx) {
    const int modes = int(!o.n.empty()) + int(o.dhp_scan) + int(o.multiperfect) + int(o.chenluo_scan);
    if (modes != 1) throw usage_error("classify needs exactly one of --n, --dhp-scan, --multiperfect, --chenluo-scan");

    if (!o.n.empty()) {
        const Natural n = parse_decimal(o.n, "--n");
        if (n < 1) throw usage_error("--n must be positive");
        const std::string hash = fnv1a_hex("classify;n=" + n.get_str());
        ClassifyReport rep;
        try {
            rep = classify(n);
        } catch (const consistency_error& e) {
            ctx.err << "THEOREM VIOLATION: " << e.what() << '\n';
            return violation;
        }
        json j = to_json(rep);
        j["config_hash"] = hash;
        if (ctx.jsonl) {
            ctx.out << j.dump() << '\n';
        } else {
            ctx.out << j.dump(2) << '\n';
        }
        return ok;
    }

    if (o.limit.empty()) throw usage_error("--limit is required for scans");
    const std::uint64_t limit = parse_u64(o.limit, "--limit");
    if (limit < 2) throw usage_error("--limit must be at least 2");
    if (limit > (std::uint64_t{1} << 40)) throw usage_error("--limit must not exceed 2^40");

    if (o.dhp_scan) {
        const std::string hash = fnv1a_hex("classify;dhp_scan;limit=" + std::to_string(limit));
        const auto found = dhp_scan(limit);
        std::vector<std::uint64_t> unexpected;
        for (auto n : found) {
            if (n != 672 && !is_even_perfect(from_u64(n))) unexpected.push_back(n);
        }
        if (ctx.jsonl) {
            for (auto n : found) {
                const auto dec = *dhp_decompose(from_u64(n));
                json j;
                j["n"] = n;
                j["k"] = integer_to_json(Natural(sigma(from_u64(n)) / from_u64(n)));
                j["m"] = integer_to_json(dec.m);
                j["q"] = integer_to_json(dec.q);
                j["alpha"] = dec.alpha;
                ctx.out << j.dump() << '\n';
            }
            json s;
            s["limit"] = limit;
            s["hits"] = found.size();
            s["config_hash"] = hash;
            ctx.out << s.dump() << '\n';
        } else {
            write_list(ctx.out, found);
            print_hash_text(ctx, hash);
        }
        for (auto n : unexpected) {
            ctx.err << "THEOREM VIOLATION: " << n << " has a DHP decomposition but is neither 672 nor an even perfect number\n";
        }
        return unexpected.empty() ? ok : violation;
    }

    if (o.multiperfect) {
        const std::string hash = fnv1a_hex("classify;multiperfect;limit=" + std::to_string(limit));
        const auto found = enumerate_multiperfect(limit);
        if (ctx.jsonl) {
            for (const auto& [n, k] : found) ctx.out << json{{"n", n}, {"k", k}}.dump() << '\n';
            json s;
            s["limit"] = limit;
            s["hits"] = found.size();
            s["config_hash"] = hash;
            ctx.out << s.dump() << '\n';
        } else {
            print_hash_text(ctx, hash);
            ctx.out << "n k\n";
            for (const auto& [n, k] : found) ctx.out << n << ' ' << k << '\n';
        }
        return ok;
    }

    const std::string hash = fnv1a_hex("classify;chenluo_scan;limit=" + std::to_string(limit));
    std::uint64_t checked = 0;
    for (std::uint64_t n = 3; n <= limit; n += 2) {
        try {
            chenluo_check(from_u64(n));
        } catch (const consistency_error& e) {
            ctx.err << "THEOREM VIOLATION: " << e.what() << '\n';
            return violation;
        }
        ++checked;
    }
    if (ctx.jsonl) {
        json s;
        s["limit"] = limit;
        s["checked"] = checked;
        s["failed"] = 0;
        s["config_hash"] = hash;
        ctx.out << s.dump() << '\n';
    } else {
        print_hash_text(ctx, hash);
        ctx.out << "checked odd n: " << checked << " failed: 0\n";
    }
    return ok;
}

// ---------------------------------------------------------------------------
// identity
// ---------------------------------------------------------------------------

inline int cmd_identity(const Options& o, Context& ctx) {
    const bool all = o.kind == "all";
    if (!all && o.kind != "trace" && o.kind != "ratio" && o.kind != "gcd") {
        throw usage_error("--kind must be all, trace, ratio or gcd");
    }
    const std::uint64_t trace_m = parse_u64(o.trace_m_max, "--trace-m-max");
    const std::uint32_t trace_q = parse_uint(o.trace_q_max, "--trace-q-max");
    const std::uint64_t ratio_m = parse_u64(o.ratio_m_max, "--ratio-m-max");
    const std::uint64_t gcd_q = parse_u64(o.gcd_q_max, "--gcd-q-max");
    const std::uint64_t gcd_m = parse_u64(o.gcd_m_max, "--gcd-m-max");
    const std::string hash = fnv1a_hex("identity;kind=" + o.kind + ";trace_m_max=" + std::to_string(trace_m) +
                                       ";trace_q_max=" + std::to_string(trace_q) +
                                       ";ratio_m_max=" + std::to_string(ratio_m) +
                                       ";gcd_q_max=" + std::to_string(gcd_q) +
                                       ";gcd_m_max=" + std::to_string(gcd_m));

    std::vector<std::pair<std::string, SweepResult>> results;
    if (all || o.kind == "trace") results.emplace_back("trace", sweep_trace(trace_m, trace_q));
    if (all || o.kind == "ratio") results.emplace_back("ratio", sweep_ratio(ratio_m));
    if (all || o.kind == "gcd") results.emplace_back("gcd", sweep_gcd(gcd_q, gcd_m));

    bool failed = false;
    if (!ctx.jsonl) print_hash_text(ctx, hash);
    for (const auto& [name, r] : results) {
        failed = failed || !r.ok();
        if (ctx.jsonl) {
            json j;
            j["identity"] = name;
            j["checked"] = r.checked;
            j["failed"] = r.failures.size();
            ctx.out << j.dump() << '\n';
        } else {
            ctx.out << name << ": checked " << r.checked << ", failed " << r.failures.size() << '\n';
        }
        for (const auto& f : r.failures) ctx.err << "THEOREM VIOLATION: " << f << '\n';
    }
    if (ctx.jsonl) {
        json s;
        s["identities"] = results.size();
        s["failed"] = failed;
        s["config_hash"] = hash;
        ctx.out << s.dump() << '\n';
    }
    return failed ? violation : ok;
}

// ---------------------------------------------------------------------------
// bound
// ---------------------------------------------------------------------------

inline int cmd_bound(const Options& o, Context& ctx) {
    const unsigned count = parse_uint(o.count, "--count", 1, 1000);
    const std::string hash = fnv1a_hex("bound;count=" + std::to_string(count));
    const Natural product = omega_bound_product(count);
    if (ctx.jsonl) {
        json j;
        j["count"] = count;
        j["product"] = integer_to_json(product);
        j["config_hash"] = hash;
        ctx.out << j.dump() << '\n';
    } else {
        ctx.out << product.get_str() << '\n';
        print_hash_text(ctx, hash);
    }
    return ok;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
               const std::atomic<bool>* interrupted = nullptr) {
    Options o;
    CLI::App app{"Desk-scale verification toolkit for odd perfect number nonexistence results", "opnum"};
    app.require_subcommand(1);

    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "jsonl"}));
    };

    auto* search = app.add_subcommand("search", "Exhaustive search for 2n^2 = sigma(q^a) or n^2 = sigma(q^a)");
    search->add_option("--equation", o.equation, "2nsq or nsq")->check(CLI::IsMember({"2nsq", "nsq"}));
    search->add_option("--q-min", o.q_min, "Smallest q");
    search->add_option("--q-max", o.q_max, "Largest q");
    search->add_option("--alpha-min", o.alpha_min, "Smallest exponent (>= 1)");
    search->add_option("--alpha-max", o.alpha_max, "Largest exponent");
    search->add_option("--q-mod4", o.q_mod4, "Only primes q with q = r mod 4 (1 or 3)");
    search->add_option("--jobs", o.jobs, "Worker threads");
    search->add_option("--checkpoint", o.checkpoint, "Checkpoint file (resumed if present)");
    search->add_option("--interrupt-after-q", o.interrupt_after, "Stop once this q is covered")->group("");
    search->add_option("--inject-fake-hit", o.inject_hit, "Fault injection: q:alpha:n")->group("");
    add_format(search);

    auto* certify = app.add_subcommand("certify", "2-adic unit certificate for q = 1 mod 4, odd alpha >= 3");
    certify->add_option("--q", o.cert_q, "Prime q = 1 mod 4");
    certify->add_option("--alpha", o.cert_alpha, "Odd exponent >= 3");
    certify->add_option("--q-max", o.cert_q_max, "Sweep every prime q = 1 mod 4 up to this bound");
    certify->add_option("--alpha-max", o.cert_alpha_max, "Sweep odd alpha in [3, alpha-max]");
    add_format(certify);

    auto* cls = app.add_subcommand("classify", "Abundancy, Euler form, DHP and 2-adic bookkeeping");
    cls->add_option("--n", o.n, "Classify a single integer");
    cls->add_flag("--dhp-scan", o.dhp_scan, "Multiperfect numbers up to --limit with a DHP decomposition");
    cls->add_flag("--multiperfect", o.multiperfect, "All multiperfect numbers up to --limit");
    cls->add_flag("--chenluo-scan", o.chenluo_scan, "Check the v2(sigma) formula for odd n up to --limit");
    cls->add_option("--limit", o.limit, "Scan bound");
    add_format(cls);

    auto* identity = app.add_subcommand("identity", "Run the algebraic identity sweeps");
    identity->add_option("--kind", o.kind, "all, trace, ratio or gcd");
    identity->add_option("--trace-m-max", o.trace_m_max);
    identity->add_option("--trace-q-max", o.trace_q_max);
    identity->add_option("--ratio-m-max", o.ratio_m_max);
    identity->add_option("--gcd-q-max", o.gcd_q_max);
    identity->add_option("--gcd-m-max", o.gcd_m_max);
    add_format(identity);

    auto* bound = app.add_subcommand("bound", "Product of sigma(p^2) over the first odd primes");
    bound->add_option("--count", o.count, "Number of odd primes");
    add_format(bound);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return ok;
        }
        err << e.what() << '\n';
        return usage;
    }

    Context ctx{out, err, interrupted, o.format == "jsonl"};
    try {
        if (search->parsed()) return cmd_search(o, ctx);
        if (certify->parsed()) return cmd_certify(o, ctx);
        if (cls->parsed()) return cmd_classify(o, ctx);
        if (identity->parsed()) return cmd_identity(o, ctx);
        return cmd_bound(o, ctx);
    } catch (const usage_error& e) {
        err << "usage error: " << e.what() << '\n';
        return usage;
    } catch (const precondition_error& e) {
        err << "usage error: " << e.what() << '\n';
        return usage;
    } catch (const consistency_error& e) {
        err << "THEOREM VIOLATION: " << e.what() << '\n';
        return violation;
    } catch (const checkpoint_error& e) {
        err << "checkpoint error: " << e.what() << '\n';
        return io;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return io;
    }
}

}  // namespace opnum::cli
