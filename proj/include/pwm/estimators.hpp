#pragma once

// Upper-bound estimates of Kolmogorov complexity K(x) and K(x|y).
//
// Every estimate is the length of a concrete description:
//
//   [8-bit format tag][1-bit mode][body]
//
// mode 0: body is x verbatim (literal fallback)
// mode 1: body is the compressor payload
//
// The encoder keeps whichever body is shorter, so
// estimate_k(x) <= |x| + header_constant(e) holds for every input.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bitstring.hpp"
#include "compress.hpp"
#include "errors.hpp"
#include "worldstate.hpp"

namespace pwm {

enum class EstimatorName : std::uint8_t { RLE = 1, LZ78 = 2, ENTROPY0 = 3, LZ77 = 4 };

struct EstimatorId {
    EstimatorName name = EstimatorName::LZ77;
    int version = 1;
    friend bool operator==(const EstimatorId&, const EstimatorId&) = default;
};

inline constexpr std::array<EstimatorName, 4> kAllEstimators{EstimatorName::RLE, EstimatorName::LZ78,
                                                            EstimatorName::ENTROPY0, EstimatorName::LZ77};

inline constexpr EstimatorId kDefaultEstimator{EstimatorName::LZ77, 1};

inline std::string to_string(EstimatorName n) {
    switch (n) {
    case EstimatorName::RLE: return "RLE";
    case EstimatorName::LZ78: return "LZ78";
    case EstimatorName::ENTROPY0: return "ENTROPY0";
    case EstimatorName::LZ77: return "LZ77";
    }
    return "?";
}

inline std::string to_string(const EstimatorId& e) { return to_string(e.name) + "/v" + std::to_string(e.version); }

/// Accepts "LZ77", "lz77" or "LZ77/v1". Throws ConfigError for anything unregistered.
inline EstimatorId parse_estimator(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    int version = 1;
    if (auto slash = upper.find("/V"); slash != std::string::npos) {
        try {
            version = std::stoi(upper.substr(slash + 2));
        } catch (const std::exception&) {
            throw ConfigError("malformed estimator version in '" + std::string(text) + "'");
        }
        upper.resize(slash);
    }
    for (auto n : kAllEstimators) {
        if (to_string(n) == upper) {
            if (version != 1) throw ConfigError("estimator " + upper + " has no version " + std::to_string(version));
            return {n, version};
        }
    }
    throw ConfigError("unknown estimator '" + std::string(text) + "' (expected RLE, LZ78, ENTROPY0 or LZ77)");
}

inline void check_registered(const EstimatorId& e) {
    if (std::find(kAllEstimators.begin(), kAllEstimators.end(), e.name) == kAllEstimators.end() || e.version != 1) {
        throw ConfigError("estimator is not registered");
    }
}

/// Format tag (8 bits) plus the literal/compressed mode flag.
inline constexpr std::size_t kFormatTagBits = 8;
inline constexpr std::size_t kHeaderConstant = kFormatTagBits + 1;

inline std::size_t header_constant(const EstimatorId& e) {
    check_registered(e);
    return kHeaderConstant;
}

/// Documented bound on how much shorter estimate_k(join(x, y)) can be than
/// estimate_k(x). Checked corpus-wide in the property tests.
inline double monotone_slack(const EstimatorId& e) {
    check_registered(e);
    switch (e.name) {
    case EstimatorName::RLE: return 2.0;
    case EstimatorName::LZ78: return 8.0;
    case EstimatorName::ENTROPY0: return 8.0;
    case EstimatorName::LZ77: return 8.0;
    }
    return 0.0;
}

struct ComplexityEstimate {
    double bits = 0.0;
    EstimatorId estimator;
    std::size_t input_length = 0;
    bool literal = true; // literal fallback was the shorter description
};

/// Full description [tag][mode][body]. Not available for ENTROPY0, which is
/// accounted by ideal code length only.
inline BitString encode(const BitString& x, const EstimatorId& e) {
    check_registered(e);
    BitString payload;
    switch (e.name) {
    case EstimatorName::RLE: payload = compress::rle_encode(x); break;
    case EstimatorName::LZ78: payload = compress::lz78_encode(x); break;
    case EstimatorName::LZ77: payload = compress::lz77_encode(x); break;
    case EstimatorName::ENTROPY0: throw ConfigError("ENTROPY0 has no bit-level codec");
    }
    BitWriter w;
    w.put_uint(static_cast<std::uint8_t>(e.name), kFormatTagBits);
    if (payload.size() < x.size()) {
        w.put(1);
        w.put(payload);
    } else {
        w.put(0);
        w.put(x);
    }
    return std::move(w).finish();
}

inline BitString decode(const BitString& description) {
    if (description.size() < kHeaderConstant) throw StructuralError("description shorter than its header");
    BitReader r(description.bits());
    auto tag = static_cast<EstimatorName>(r.get_uint(kFormatTagBits));
    auto body = description.slice(kHeaderConstant, description.size() - kHeaderConstant);
    if (r.get() == 0) return body;
    switch (tag) {
    case EstimatorName::RLE: return compress::rle_decode(body);
    case EstimatorName::LZ78: return compress::lz78_decode(body);
    case EstimatorName::LZ77: return compress::lz77_decode(body);
    default: throw StructuralError("unknown format tag");
    }
}

inline ComplexityEstimate estimate_k(const BitString& x, const EstimatorId& e) {
    check_registered(e);
    ComplexityEstimate est{0.0, e, x.size(), true};
    if (e.name == EstimatorName::ENTROPY0) {
        double payload = compress::entropy0_payload_bits(x);
        est.literal = !(payload < static_cast<double>(x.size()));
        est.bits = static_cast<double>(kHeaderConstant) + (est.literal ? static_cast<double>(x.size()) : payload);
        return est;
    }
    auto description = encode(x, e);
    est.bits = static_cast<double>(description.size());
    est.literal = description[kFormatTagBits] == 0;
    return est;
}

/// Cost of delimiting a description of `given_bits` bits inside a two-part
/// description, plus one bit telling the two-part form from the one-part form.
inline double two_part_overhead(double given_bits) {
    return 1.0 + static_cast<double>(codes::gamma_length(static_cast<std::uint64_t>(given_bits) + 1));
}

/// K(x | given) ~= K(join(given, x)) - K(given), clamped at zero.
///
/// The joint term is the shorter of two concrete descriptions of
/// join(given, x): compressing it whole, or describing `given` (length
/// prefixed) followed by `x`. The second keeps
/// K(x | given) <= K(x) + two_part_overhead(K(given)) even when the two parts
/// have unrelated statistics that a single compressor pass handles badly.
inline double conditional_bits(double whole, double given, double own) {
    return std::max(0.0, std::min(whole, given + two_part_overhead(given) + own) - given);
}

inline ComplexityEstimate estimate_conditional_k(const BitString& x, const BitString& given, const EstimatorId& e) {
    auto whole = estimate_k(join(given, x), e);
    auto base = estimate_k(given, e);
    auto own = estimate_k(x, e);
    return {conditional_bits(whole.bits, base.bits, own.bits), e, x.size(), whole.literal};
}

struct BoundRow {
    std::size_t length = 0;
    double bits = 0.0;
    double limit = 0.0;
    bool literal = true;
    bool pass = true;
};

struct BoundReport {
    EstimatorId estimator;
    std::vector<BoundRow> rows;
    std::size_t violations = 0;
    std::size_t compressed = 0; // rows where the compressor beat the literal

    bool pass() const { return violations == 0; }
};

/// Checks estimate_k(x) <= |x| + header_constant(e) for each corpus string.
inline BoundReport solomonoff_bound_check(const std::vector<BitString>& corpus, const EstimatorId& e) {
    if (corpus.empty()) throw std::invalid_argument("solomonoff_bound_check: empty corpus");
    BoundReport report{e, {}, 0, 0};
    report.rows.reserve(corpus.size());
    for (const auto& x : corpus) {
        auto est = estimate_k(x, e);
        BoundRow row{x.size(), est.bits, static_cast<double>(x.size() + header_constant(e)), est.literal, true};
        row.pass = row.bits <= row.limit;
        report.violations += row.pass ? 0 : 1;
        report.compressed += row.literal ? 0 : 1;
        report.rows.push_back(row);
    }
    return report;
}

} // namespace pwm
