#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ctm.hpp"
#include "estimators.hpp"
#include "similarity.hpp"
#include "worldstate.hpp"
#include "xorshift.hpp"

namespace pwm {

inline constexpr double kDefaultTauEnv = 0.25;
inline constexpr double kDefaultTieEps = 0.05;

struct RankingRequest {
    WorldState actual;
    std::vector<WorldState> candidates;
    EstimatorId estimator = kDefaultEstimator;
    ctm::MachineClass ctm_class{2, 1000};
    double tau_env = kDefaultTauEnv;
    double tie_eps = kDefaultTieEps;
    ProbabilityKernel kernel = ProbabilityKernel::Exponential;
};

struct RankingEntry {
    std::string label;
    std::optional<double> distance; // only computed for environment-compatible candidates
    double delta_si = 0.0;
    double probability = 0.0;
    bool compatible = false;
};

struct CounterfactualRanking {
    std::vector<RankingEntry> entries;
    std::vector<std::vector<std::string>> plurality_classes;

    std::size_t compatible_count() const {
        return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.compatible; }));
    }
    bool empty_compatible() const { return compatible_count() == 0; }
};

namespace detail {

/// Runs body(i) for i in [0, n) across hardware threads. Each i must touch only its own slot.
template <typename F>
void parallel_for(std::size_t n, F&& body) {
    unsigned threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += threads) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    pool.clear();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace detail

/// Groups entries whose distances chain together with gaps <= tie_eps.
/// On a line, transitive closure of "within tie_eps" is exactly this
/// consecutive-gap rule. Classes come out closest first.
inline std::vector<std::vector<std::string>> plurality_classes(std::vector<std::pair<std::string, double>> entries,
                                                               double tie_eps) {
    for (const auto& [label, d] : entries) {
        if (!std::isfinite(d)) throw std::invalid_argument("plurality_classes: distance for '" + label + "' is not finite");
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    std::vector<std::vector<std::string>> classes;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i == 0 || entries[i].second - entries[i - 1].second > tie_eps) classes.emplace_back();
        classes.back().push_back(entries[i].first);
    }
    return classes;
}

/// Filters by environment compatibility (delta_si <= tau_env), orders the
/// survivors by similarity distance and normalizes their probabilities.
inline CounterfactualRanking rank(const RankingRequest& r, const ctm::CtmDistribution& environments) {
    if (r.candidates.empty()) throw std::invalid_argument("rank: no candidates");
    if (r.tau_env < 0.0 || r.tau_env > 1.0) throw std::invalid_argument("rank: tau_env must be in [0, 1]");
    if (r.tie_eps < 0.0 || r.tie_eps > 1.0) throw std::invalid_argument("rank: tie_eps must be in [0, 1]");
    check_registered(r.estimator);

    const auto& actual = r.actual.payload();
    std::vector<RankingEntry> entries(r.candidates.size());
    detail::parallel_for(r.candidates.size(), [&](std::size_t i) {
        const auto& c = r.candidates[i];
        auto& e = entries[i];
        e.label = c.label();
        e.delta_si = ctm::delta_si(actual, c.payload(), environments);
        e.compatible = e.delta_si <= r.tau_env;
        if (e.compatible) e.distance = similarity(actual, c.payload(), r.estimator).value;
    });

    std::sort(entries.begin(), entries.end(), [](const RankingEntry& a, const RankingEntry& b) {
        if (a.compatible != b.compatible) return a.compatible;
        if (a.compatible && *a.distance != *b.distance) return *a.distance < *b.distance;
        return a.label < b.label;
    });

    CounterfactualRanking out;
    std::vector<std::pair<std::string, double>> distances;
    for (const auto& e : entries) {
        if (e.compatible) distances.emplace_back(e.label, *e.distance);
    }
    if (!distances.empty()) {
        auto probs = to_probabilities(distances, r.kernel);
        for (std::size_t i = 0; i < distances.size(); ++i) entries[i].probability = probs.entries[i].probability;
        out.plurality_classes = plurality_classes(distances, r.tie_eps);
    }
    out.entries = std::move(entries);
    return out;
}

inline CounterfactualRanking rank(const RankingRequest& r) { return rank(r, ctm::enumerate(r.ctm_class)); }

// ---------------------------------------------------------------------------
// Limit check

struct LimitRow {
    std::string label;
    std::size_t difference_bits = 0;
    double difference_k = 0.0; // estimate minus the estimator header
    bool at_limit = false;
};

struct LimitReport {
    std::vector<LimitRow> rows;
    std::size_t at_limit = 0;
};

/// Candidate bits that differ from the actual world. When both share a field
/// layout this is the concatenation of the candidate's differing fields;
/// otherwise the candidate's span from the first to the last differing bit.
inline BitString difference_region(const WorldState& actual, const WorldState& candidate) {
    const auto& a = actual.payload();
    const auto& c = candidate.payload();
    auto same_layout = [&] {
        const auto& ma = actual.manifest();
        const auto& mc = candidate.manifest();
        if (ma.size() != mc.size() || ma.empty()) return false;
        for (std::size_t i = 0; i < ma.size(); ++i) {
            if (ma[i].name != mc[i].name || ma[i].offset != mc[i].offset || ma[i].width != mc[i].width) return false;
        }
        return true;
    };
    if (same_layout()) {
        BitWriter w;
        for (const auto& f : candidate.manifest()) {
            auto cf = c.slice(f.offset, f.width);
            if (cf != a.slice(f.offset, f.width)) w.put(cf);
        }
        return std::move(w).finish();
    }
    std::size_t first = 0;
    while (first < a.size() && first < c.size() && a[first] == c[first]) ++first;
    if (first == c.size() && c.size() == a.size()) return {};
    std::size_t last = c.size();
    if (a.size() == c.size()) {
        while (last > first && a[last - 1] == c[last - 1]) --last;
    }
    return c.slice(std::min(first, c.size()), last - std::min(first, c.size()));
}

/// A candidate is "at the limit" when everything that separates it from the
/// actual world is incompressible: the estimator saves fewer than `slack` bits
/// on its difference region.
inline LimitReport limit_check(const WorldState& actual, const std::vector<WorldState>& candidates,
                               const EstimatorId& e = kDefaultEstimator, double slack = 2.0) {
    LimitReport report;
    for (const auto& c : candidates) {
        LimitRow row{c.label(), 0, 0.0, false};
        auto region = difference_region(actual, c);
        row.difference_bits = region.size();
        if (!region.empty()) {
            row.difference_k = estimate_k(region, e).bits - static_cast<double>(header_constant(e));
            row.at_limit = row.difference_k >= static_cast<double>(region.size()) - slack;
        }
        report.at_limit += row.at_limit ? 1 : 0;
        report.rows.push_back(std::move(row));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Binary lottery: five numbers drawn without replacement from 0..255.

using LotteryNumbers = std::array<int, 5>;

inline constexpr LotteryNumbers kDefaultTicket{71, 43, 66, 87, 99};
inline constexpr LotteryNumbers kDefaultDraw{71, 43, 66, 87, 100};

struct LotteryOptions {
    EstimatorId estimator = kDefaultEstimator;
    ctm::MachineClass ctm_class{2, 1000};
    double tau_env = kDefaultTauEnv;
    double tie_eps = kDefaultTieEps;
    /// Bits of unchanged surroundings shared by every world ("everything else
    /// is the same"). Generated from context_seed.
    std::size_t context_bits = 4096;
    std::uint64_t context_seed = Xorshift64::kDefaultSeed;
};

struct NumberRow {
    int number = 0;
    BitString bits;
    double complexity = 0.0; // estimate_k in bits
    double deficiency = 0.0; // 1 - K / (length + header): 0 for incompressible
    double weight = 0.0;     // exp(-deficiency)
    double probability = 0.0;
};

struct LotteryReport {
    LotteryNumbers ticket{};
    LotteryNumbers drawn{};
    std::vector<NumberRow> numbers;
    WorldState actual;
    CounterfactualRanking ranking;
    std::optional<std::string> winning_world;
    bool actual_is_winner = false;
    std::string note;
};

inline void validate_lottery_numbers(const LotteryNumbers& v, const char* what) {
    for (auto n : v) {
        if (n < 0 || n > 255) {
            throw std::out_of_range(std::string(what) + " number " + std::to_string(n) + " outside [0, 255]");
        }
    }
}

inline std::string lottery_label(const LotteryNumbers& v) {
    std::string s = "draw";
    char buf[8];
    for (auto n : v) {
        std::snprintf(buf, sizeof buf, "-%03d", n);
        s += buf;
    }
    return s;
}

inline Scenario lottery_scenario(const LotteryNumbers& v, const BitString& context) {
    Scenario s{lottery_label(v), {}};
    if (!context.empty()) s.fields.push_back({"context", BitsValue{context}});
    for (std::size_t i = 0; i < v.size(); ++i) {
        s.fields.push_back({"n" + std::to_string(i + 1), UintValue{8, static_cast<std::uint64_t>(v[i])}});
    }
    return s;
}

/// All worlds that agree with the draw on the first four numbers: the fifth
/// ranges over every value not already drawn, the actual one included.
inline std::vector<LotteryNumbers> lottery_counterfactuals(const LotteryNumbers& drawn) {
    std::vector<LotteryNumbers> out;
    for (int v = 0; v < 256; ++v) {
        if (std::find(drawn.begin(), drawn.begin() + 4, v) != drawn.begin() + 4) continue;
        auto w = drawn;
        w[4] = v;
        out.push_back(w);
    }
    return out;
}

inline LotteryReport lottery_demo(const LotteryNumbers& ticket = kDefaultTicket, const LotteryNumbers& drawn = kDefaultDraw,
                                  const LotteryOptions& opt = {}) {
    validate_lottery_numbers(ticket, "ticket");
    validate_lottery_numbers(drawn, "drawn");
    if (std::set<int>(drawn.begin(), drawn.end()).size() != drawn.size()) {
        throw std::invalid_argument("drawn numbers must be distinct (the draw is without replacement)");
    }

    LotteryReport rep;
    rep.ticket = ticket;
    rep.drawn = drawn;

    // per-number randomness of the drawn values
    const double header = static_cast<double>(header_constant(opt.estimator));
    std::vector<std::pair<std::string, double>> deficiencies;
    for (auto n : drawn) {
        NumberRow row;
        row.number = n;
        row.bits = BitString::from_uint(static_cast<std::uint64_t>(n), 8);
        row.complexity = estimate_k(row.bits, opt.estimator).bits;
        row.deficiency = std::max(0.0, 1.0 - row.complexity / (static_cast<double>(row.bits.size()) + header));
        row.weight = kernel_weight(row.deficiency);
        deficiencies.emplace_back(std::to_string(n), row.deficiency);
        rep.numbers.push_back(std::move(row));
    }
    auto probs = to_probabilities(deficiencies);
    for (std::size_t i = 0; i < rep.numbers.size(); ++i) rep.numbers[i].probability = probs.entries[i].probability;

    auto context = random_bits(opt.context_bits, opt.context_seed);
    rep.actual = digitalize(lottery_scenario(drawn, context));
    RankingRequest req;
    req.actual = rep.actual;
    req.estimator = opt.estimator;
    req.ctm_class = opt.ctm_class;
    req.tau_env = opt.tau_env;
    req.tie_eps = opt.tie_eps;
    for (const auto& w : lottery_counterfactuals(drawn)) {
        req.candidates.push_back(digitalize(lottery_scenario(w, context)));
        if (w == ticket) rep.winning_world = lottery_label(w);
    }
    rep.ranking = rank(req);

    rep.actual_is_winner = ticket == drawn;
    if (rep.actual_is_winner) {
        rep.note = "actual world is the winning world";
    } else if (rep.winning_world) {
        rep.note = "the winning world ends in " + std::to_string(ticket[4]) + "; the actual draw ends in " +
                   std::to_string(drawn[4]);
    } else {
        rep.note = "no world in the counterfactual set matches the ticket";
    }
    return rep;
}

} // namespace pwm
