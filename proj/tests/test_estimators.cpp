#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <string>

#include "pwm/estimators.hpp"
#include "pwm/xorshift.hpp"

using namespace pwm;

namespace {

const EstimatorId kRle{EstimatorName::RLE, 1};
const EstimatorId kLz78{EstimatorName::LZ78, 1};
const EstimatorId kEntropy0{EstimatorName::ENTROPY0, 1};
const EstimatorId kLz77{EstimatorName::LZ77, 1};

BitString periodic(std::string_view period, std::size_t n) {
    std::string s;
    while (s.size() < n) s += period;
    s.resize(n);
    return BitString::from_text(s);
}

// Reference LZ78 parse over text, independent of the trie encoder: token
// cost is ceil(log2(dictionary size)) index bits plus one literal bit.
double lz78_oracle_bits(const std::string& x) {
    std::map<std::string, std::size_t> dict{{"", 0}};
    double payload = 0;
    std::size_t i = 0;
    while (i < x.size()) {
        std::string phrase;
        while (i < x.size() && dict.count(phrase + x[i])) phrase += x[i++];
        payload += std::ceil(std::log2(static_cast<double>(dict.size())));
        if (i == x.size()) break;
        dict.emplace(phrase + x[i++], dict.size());
        payload += 1;
    }
    return 9 + std::min(payload, static_cast<double>(x.size()));
}

// Laplace sequential probability is c0! c1! / (n+1)!.
double entropy0_oracle_bits(const BitString& x) {
    double ones = 0;
    for (auto b : x.bits()) ones += b;
    double zeros = static_cast<double>(x.size()) - ones;
    auto lf = [](double k) { return std::lgamma(k + 1) / std::log(2.0); };
    return lf(static_cast<double>(x.size()) + 1) - lf(zeros) - lf(ones);
}

std::vector<BitString> mixed_corpus(std::uint64_t seed, int count, std::size_t max_len) {
    Xorshift64 rng(seed);
    std::vector<BitString> out;
    for (int i = 0; i < count; ++i) {
        auto len = rng.below(max_len);
        switch (i % 4) {
        case 0: out.push_back(rng.bits(len)); break;
        case 1: out.push_back(periodic(rng.bits(1 + rng.below(8)).to_text(), len)); break;
        case 2: out.push_back(BitString(std::vector<std::uint8_t>(len, static_cast<std::uint8_t>(i % 2)))); break;
        default: {
            std::vector<std::uint8_t> v(len);
            for (auto& b : v) b = rng.below(10) == 0;
            out.push_back(BitString(std::move(v)));
        }
        }
    }
    return out;
}

} // namespace

TEST(Estimator, ParseNames) {
    EXPECT_EQ(parse_estimator("lz78"), kLz78);
    EXPECT_EQ(parse_estimator("LZ77/v1"), kLz77);
    EXPECT_EQ(parse_estimator("Entropy0"), kEntropy0);
    EXPECT_THROW(parse_estimator("gzip"), ConfigError);
    EXPECT_THROW(parse_estimator("LZ78/v2"), ConfigError);
    EXPECT_THROW(header_constant(EstimatorId{EstimatorName::RLE, 3}), ConfigError);
}

TEST(Estimator, EmptyStringCostsExactlyTheHeader) {
    for (auto n : kAllEstimators) {
        EstimatorId e{n, 1};
        EXPECT_EQ(estimate_k({}, e).bits, static_cast<double>(header_constant(e))) << to_string(e);
    }
    EXPECT_EQ(header_constant(kLz77), 9u);
}

TEST(Estimator, Lz78PeriodicMatchesOracle) {
    auto x = periodic("01", 1024);
    double oracle = lz78_oracle_bits(x.to_text());
    EXPECT_EQ(oracle, 387.0);
    EXPECT_EQ(estimate_k(x, kLz78).bits, oracle);
}

TEST(Estimator, Lz78MatchesOracleOnCorpus) {
    for (const auto& x : mixed_corpus(31, 200, 2000)) {
        EXPECT_EQ(estimate_k(x, kLz78).bits, lz78_oracle_bits(x.to_text())) << x.size();
    }
}

TEST(Estimator, Lz78RandomIsIncompressible) {
    EXPECT_GE(estimate_k(random_bits(1024), kLz78).bits, 1024.0 - 64.0);
}

TEST(Estimator, Entropy0MatchesClosedForm) {
    for (const auto& x : mixed_corpus(32, 200, 3000)) {
        EXPECT_NEAR(compress::entropy0_ideal_bits(x), entropy0_oracle_bits(x), 1e-6 * (1 + static_cast<double>(x.size())));
        double payload = static_cast<double>(codes::delta_length(x.size() + 1)) + std::ceil(entropy0_oracle_bits(x) - 1e-9);
        double expected = 9 + std::min(payload, static_cast<double>(x.size()));
        EXPECT_EQ(estimate_k(x, kEntropy0).bits, expected);
    }
}

TEST(Estimator, StructuredInputsCompress) {
    auto zeros = BitString(std::vector<std::uint8_t>(1024, 0));
    EXPECT_EQ(estimate_k(zeros, kRle).bits, 31.0);
    EXPECT_EQ(estimate_k(zeros, kEntropy0).bits, 37.0);
    EXPECT_EQ(estimate_k(zeros, kLz77).bits, 30.0);
    EXPECT_EQ(estimate_k(periodic("01", 1024), kLz77).bits, 32.0);
    EXPECT_EQ(estimate_k(random_bits(1024), kLz77).bits, 1033.0);
}

TEST(Estimator, EncodeDecodeRoundTrip) {
    for (auto e : {kRle, kLz78, kLz77}) {
        for (const auto& x : mixed_corpus(33, 240, 3000)) {
            auto d = encode(x, e);
            EXPECT_EQ(static_cast<double>(d.size()), estimate_k(x, e).bits);
            EXPECT_EQ(decode(d), x) << to_string(e) << " len " << x.size();
        }
    }
}

TEST(Estimator, DecodeRejectsGarbage) {
    EXPECT_THROW(decode(BitString::from_text("0101")), StructuralError);
    EXPECT_THROW(decode(BitString::from_text("111111111")), StructuralError);
    EXPECT_THROW(encode(random_bits(10), kEntropy0), ConfigError);
}

TEST(Conditional, GivenNothing) {
    // join(empty, x) = "1" ++ x and K(empty) is the bare header.
    for (auto e : {kRle, kLz78, kEntropy0, kLz77}) {
        for (const auto& x : mixed_corpus(34, 40, 1500)) {
            auto cond = estimate_conditional_k(x, {}, e).bits;
            auto whole = estimate_k(join({}, x), e).bits - static_cast<double>(header_constant(e));
            EXPECT_EQ(cond, std::max(0.0, std::min(whole, estimate_k(x, e).bits + two_part_overhead(9))));
            EXPECT_LE(cond, estimate_k(x, e).bits + two_part_overhead(9));
        }
    }
}

TEST(Conditional, OneBitFlipIsCheapGivenTheOriginal) {
    auto x = random_bits(512);
    auto flipped = x.with_flipped(200);
    EXPECT_LE(estimate_conditional_k(x, flipped, kLz77).bits, 0.3 * estimate_k(x, kLz77).bits);
}

TEST(Conditional, SelfConditionedIsSmall) {
    auto x = random_bits(4096, 5);
    EXPECT_LE(estimate_conditional_k(x, x, kLz77).bits, 0.02 * estimate_k(x, kLz77).bits);
}

TEST(SolomonoffBound, AllByteStringsRle) {
    std::vector<BitString> corpus;
    for (unsigned v = 0; v < 256; ++v) corpus.push_back(BitString::from_uint(v, 8));
    auto rep = solomonoff_bound_check(corpus, kRle);
    EXPECT_TRUE(rep.pass());
    EXPECT_EQ(rep.rows.size(), 256u);
}

TEST(SolomonoffBound, EmptyStringAndEmptyCorpus) {
    EXPECT_TRUE(solomonoff_bound_check({BitString{}}, kLz78).pass());
    EXPECT_THROW(solomonoff_bound_check({}, kLz78), std::invalid_argument);
}

TEST(SolomonoffBound, RandomStringsLz78) {
    Xorshift64 rng(41);
    std::vector<BitString> corpus;
    for (int i = 0; i < 100; ++i) corpus.push_back(rng.bits(4096));
    auto rep = solomonoff_bound_check(corpus, kLz78);
    EXPECT_EQ(rep.violations, 0u);
}

TEST(EstimatorProperty, MonotoneInformation) {
    auto corpus = mixed_corpus(35, 160, 800);
    for (auto n : kAllEstimators) {
        EstimatorId e{n, 1};
        for (std::size_t i = 0; i + 1 < corpus.size(); i += 2) {
            const auto& x = corpus[i];
            const auto& y = corpus[i + 1];
            EXPECT_GE(estimate_k(join(x, y), e).bits, estimate_k(x, e).bits - monotone_slack(e)) << to_string(e);
        }
    }
}

TEST(EstimatorProperty, ConditionalNeverExceedsUnconditional) {
    auto corpus = mixed_corpus(36, 160, 800);
    for (auto n : kAllEstimators) {
        EstimatorId e{n, 1};
        for (std::size_t i = 0; i + 1 < corpus.size(); ++i) {
            const auto& x = corpus[i];
            const auto& g = corpus[i + 1];
            auto kg = estimate_k(g, e).bits;
            EXPECT_LE(estimate_conditional_k(x, g, e).bits, estimate_k(x, e).bits + two_part_overhead(kg)) << to_string(e);
        }
    }
}

TEST(EstimatorProperty, BoundHoldsOnMixedCorpus) {
    auto corpus = mixed_corpus(37, 300, 5000);
    for (auto n : kAllEstimators) EXPECT_TRUE(solomonoff_bound_check(corpus, {n, 1}).pass());
}
