#pragma once

// JSON encoding shared by reports, checkpoints and the CLI. Object keys keep
// insertion order so every line is byte-stable.

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "opnum/arith.hpp"
#include "opnum/quad_order.hpp"

namespace opnum {

using json = nlohmann::ordered_json;

/// Integers that fit in 64 bits become JSON numbers, anything larger (or
/// negative) a decimal string.
inline json integer_to_json(const Integer& v) {
    if (fits_u64(v)) return to_u64(v);
    return v.get_str();
}

inline Integer integer_from_json(const json& j) {
    if (j.is_number_unsigned()) return from_u64(j.get<std::uint64_t>());
    if (j.is_number_integer()) return Integer(std::to_string(j.get<std::int64_t>()));
    if (j.is_string()) {
        Integer v;
        if (v.set_str(j.get<std::string>(), 10) != 0) {
            throw checkpoint_error("malformed integer string '" + j.get<std::string>() + "'");
        }
        return v;
    }
    throw checkpoint_error("expected an integer, got " + j.dump());
}

inline std::string rational_to_string(const Rational& r) {
    return r.get_den() == 1 ? r.get_num().get_str() : r.get_str();
}

/// 64-bit FNV-1a as 16 lowercase hex digits.
inline std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline json to_json(const CertificateReport& rep) {
    json summands = json::array();
    for (const auto& sv : rep.summands) summands.push_back({{"i", sv.i}, {"v2", sv.v2}});
    json j;
    j["q"] = integer_to_json(rep.q);
    j["alpha"] = rep.alpha;
    j["summands"] = std::move(summands);
    j["v2_total"] = rep.s_nonzero ? json(rep.v2_total) : json(nullptr);
    j["passed"] = rep.passed;
    j["s"] = rational_to_string(rep.s);
    j["forms_agree"] = rep.forms_agree;
    return j;
}

}  // namespace opnum
