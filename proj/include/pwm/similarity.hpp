#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "estimators.hpp"

namespace pwm {

/// Compression estimates are imperfect, so normalized scores may exceed 1 by
/// up to this much. Anything beyond it is treated as an estimator defect.
inline constexpr double kEstimatorAllowance = 0.2;

struct SimilarityScore {
    double value = 0.0;
    EstimatorId estimator;
};

/// Every quantity that goes into one similarity score.
struct SimilarityTerms {
    double k_x = 0.0;
    double k_y = 0.0;
    double k_x_given_y = 0.0;
    double k_y_given_x = 0.0;
    double value = 0.0;
};

/// max{K(x|y), K(y|x)} / max{K(x), K(y)}. 0 means identical, ~1 unrelated.
inline SimilarityTerms similarity_terms(const BitString& x, const BitString& y, const EstimatorId& e) {
    if (x.empty() && y.empty()) throw std::invalid_argument("similarity: both world-states are empty");
    SimilarityTerms t;
    t.k_x = estimate_k(x, e).bits;
    t.k_y = estimate_k(y, e).bits;
    t.k_x_given_y = conditional_bits(estimate_k(join(y, x), e).bits, t.k_y, t.k_x);
    t.k_y_given_x = conditional_bits(estimate_k(join(x, y), e).bits, t.k_x, t.k_y);
    t.value = std::max(t.k_x_given_y, t.k_y_given_x) / std::max(t.k_x, t.k_y);
    if (!(t.value <= 1.0 + kEstimatorAllowance)) {
        throw std::logic_error("similarity " + std::to_string(t.value) + " exceeds 1 + estimator allowance (" +
                               to_string(e) + ")");
    }
    return t;
}

inline SimilarityScore similarity(const BitString& x, const BitString& y, const EstimatorId& e = kDefaultEstimator) {
    return {similarity_terms(x, y, e).value, e};
}

/// Monotone decreasing map from distance to unnormalized weight.
enum class ProbabilityKernel { Exponential, Reciprocal };

inline ProbabilityKernel parse_kernel(std::string_view name) {
    if (name == "exp") return ProbabilityKernel::Exponential;
    if (name == "reciprocal") return ProbabilityKernel::Reciprocal;
    throw ConfigError("unknown probability kernel '" + std::string(name) + "' (expected exp or reciprocal)");
}

inline double kernel_weight(double distance, ProbabilityKernel k = ProbabilityKernel::Exponential) {
    switch (k) {
    case ProbabilityKernel::Exponential: return std::exp(-distance);
    case ProbabilityKernel::Reciprocal: return 1.0 / (1.0 + distance);
    }
    return 0.0;
}

struct ProbabilityEntry {
    std::string id;
    double probability = 0.0;
};

struct ProbabilityVector {
    std::vector<ProbabilityEntry> entries;

    double sum() const {
        double s = 0.0;
        for (const auto& e : entries) s += e.probability;
        return s;
    }
};

/// Weights each distance with the kernel and normalizes to sum 1.
inline ProbabilityVector to_probabilities(const std::vector<std::pair<std::string, double>>& distances,
                                          ProbabilityKernel kernel = ProbabilityKernel::Exponential) {
    if (distances.empty()) throw std::invalid_argument("to_probabilities: no candidates");
    double shift = 0.0;
    for (const auto& [id, d] : distances) {
        if (!std::isfinite(d)) throw std::invalid_argument("to_probabilities: distance for '" + id + "' is not finite");
        if (kernel == ProbabilityKernel::Reciprocal && d <= -1.0) {
            throw std::invalid_argument("to_probabilities: reciprocal kernel needs distance > -1");
        }
    }
    // exp(-(d - dmin)) normalizes to the same vector and cannot underflow to all zeros
    if (kernel == ProbabilityKernel::Exponential) {
        shift = std::min_element(distances.begin(), distances.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; })
                    ->second;
    }
    std::vector<double> w;
    w.reserve(distances.size());
    double total = 0.0;
    for (const auto& [id, d] : distances) {
        w.push_back(kernel_weight(d - shift, kernel));
        total += w.back();
    }
    ProbabilityVector out;
    out.entries.reserve(distances.size());
    for (std::size_t i = 0; i < distances.size(); ++i) out.entries.push_back({distances[i].first, w[i] / total});
    return out;
}

} // namespace pwm
