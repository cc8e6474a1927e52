#include <gtest/gtest.h>

#include <filesystem>

#include "ctm_oracle.hpp"
#include "pwm/ctm.hpp"
#include "pwm/xorshift.hpp"

using namespace pwm;
using namespace pwm::ctm;

namespace {

const CtmDistribution& n2() {
    static const CtmDistribution d = enumerate({2, 1000});
    return d;
}

std::filesystem::path temp_dir() {
    auto p = std::filesystem::temp_directory_path() / ("pwm-ctm-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
    std::filesystem::create_directories(p);
    return p;
}

} // namespace

TEST(MachineEncoding, LengthsAndClassSizes) {
    EXPECT_EQ(encoding_length(1), 7u);
    EXPECT_EQ(encoding_length(2), 19u);
    EXPECT_EQ(encoding_length(3), 27u);
    for (int n = 1; n <= 5; ++n) EXPECT_EQ(encoding_length(static_cast<unsigned>(n)), static_cast<std::size_t>(oracle::description_bits(n)));
    EXPECT_EQ(class_size(1), 64u);
    EXPECT_EQ(class_size(2), 20736u);
    EXPECT_EQ(class_size(3), 16777216u);
}

TEST(MachineEncoding, IndexRoundTripAndOrderMatchesEncoding) {
    for (unsigned n : {1u, 2u}) {
        BitString prev;
        for (std::uint64_t i = 0; i < class_size(n); ++i) {
            auto m = MachineSpec::from_index(n, i);
            EXPECT_EQ(m.index(), i);
            auto enc = m.encoding();
            EXPECT_EQ(enc.size(), encoding_length(n));
            if (i > 0) {
                EXPECT_LT(prev, enc);
            }
            prev = enc;
        }
    }
    EXPECT_THROW(MachineSpec::from_index(1, 64), std::out_of_range);
}

TEST(Enumerate, OneStateMatchesHandCount) {
    auto d = enumerate({1, 1000});
    EXPECT_EQ(d.outputs().size(), 4u);
    EXPECT_EQ(d.halting_machines(), 36u);
    for (const auto* text : {"0", "1", "00", "10"}) {
        const auto* s = d.find(BitString::from_text(text));
        ASSERT_NE(s, nullptr) << text;
        EXPECT_EQ(s->machines, 9u);
        EXPECT_EQ(s->weight, Dyadic(9, 7));
    }
}

TEST(Enumerate, MatchesOracleForOneAndTwoStates) {
    for (unsigned n : {1u, 2u}) {
        auto ref = oracle::enumerate(static_cast<int>(n), 1000);
        auto d = n == 2 ? n2() : enumerate({n, 1000});
        EXPECT_EQ(oracle::compare(ref, d), "");
        EXPECT_EQ(serialize(d), serialize(oracle::to_distribution(ref, {n, 1000})));
    }
    EXPECT_EQ(n2().halting_machines(), 10932u);
    EXPECT_EQ(n2().outputs().size(), 20u);
}

TEST(Enumerate, BudgetOfOneStep) {
    for (unsigned n : {1u, 2u}) {
        auto d = enumerate({n, 1});
        EXPECT_EQ(oracle::compare(oracle::enumerate(static_cast<int>(n), 1), d), "");
        // only machines whose first transition halts: one entry fixed to HALT out of n+1 targets
        EXPECT_EQ(d.halting_machines(), class_size(n) / (n + 1));
    }
}

TEST(Enumerate, OrderAndThreadsDoNotMatter) {
    auto reference = serialize(n2());
    EnumerateOptions shuffled;
    shuffled.shuffle_seed = 99;
    EXPECT_EQ(serialize(enumerate({2, 1000}, shuffled)), reference);
    EnumerateOptions reversed;
    reversed.reverse = true;
    reversed.threads = 3;
    EXPECT_EQ(serialize(enumerate({2, 1000}, reversed)), reference);
    EnumerateOptions single;
    single.threads = 1;
    EXPECT_EQ(serialize(enumerate({2, 1000}, single)), reference);
}

TEST(Enumerate, LongerBudgetOnlyAddsHalters) {
    std::uint64_t prev = 0;
    for (std::uint64_t budget : {1, 2, 3, 5, 10, 100, 1000}) {
        auto d = enumerate({2, budget});
        EXPECT_GE(d.halting_machines(), prev);
        prev = d.halting_machines();
        for (const auto& [out, s] : d.outputs()) {
            const auto* full = n2().find(out);
            ASSERT_NE(full, nullptr) << out.to_text();
            EXPECT_LE(s.weight, full->weight);
        }
    }
}

TEST(Enumerate, RefusesAboveCap) {
    EnumerateOptions tight;
    tight.cap = 1000;
    EXPECT_THROW(enumerate({2, 1000}, tight), CapExceeded);
    EXPECT_THROW(enumerate({6, 1000}), CapExceeded);
    EXPECT_THROW(enumerate({0, 1000}), std::invalid_argument);
    EXPECT_THROW(enumerate({2, 0}), std::invalid_argument);
}

TEST(SimplestEnvironment, ZeroPrintingHalter) {
    auto ref = oracle::enumerate(2, 1000);
    auto x = BitString::from_text("0");
    auto env = simplest_environment(x, n2());
    ASSERT_FALSE(env.fallback);
    ASSERT_TRUE(env.machine);
    EXPECT_EQ(env.machine->index(), ref.outputs.at("0").first_index);
    EXPECT_EQ(run(*env.machine, 1000), x);
    EXPECT_EQ(env.description_bits, 19u);
    EXPECT_EQ(env.weight(), Dyadic::power_of_half(19));
    // first entry: write 0, move left, go to state 1; state 1 on blank halts
    EXPECT_EQ(env.machine->at(0, 0).next, 1u);
    EXPECT_EQ(env.machine->at(1, 0).next, 2u);
}

TEST(SimplestEnvironment, Deterministic) {
    auto x = BitString::from_text("110");
    auto a = simplest_environment(x, n2());
    auto b = simplest_environment(x, n2());
    EXPECT_EQ(a.machine, b.machine);
    EXPECT_EQ(a.description_bits, b.description_bits);
}

TEST(SimplestEnvironment, RandomStringFallsBack) {
    auto x = random_bits(32);
    auto env = simplest_environment(x, n2());
    EXPECT_TRUE(env.fallback);
    EXPECT_FALSE(env.machine);
    EXPECT_EQ(env.weight(), Dyadic::power_of_half(32 + kLiteralOverhead));
}

TEST(DeltaSi, SymmetricAndBounded) {
    Xorshift64 rng(51);
    std::vector<BitString> pool;
    for (const auto& [out, s] : n2().outputs()) pool.push_back(out);
    for (int i = 0; i < 20; ++i) pool.push_back(rng.bits(rng.below(12)));
    for (const auto& x : pool) {
        EXPECT_EQ(delta_si(x, x, n2()), 0.0);
        for (const auto& y : pool) {
            auto d = delta_si(x, y, n2());
            EXPECT_EQ(d, delta_si(y, x, n2()));
            EXPECT_GE(d, 0.0);
            EXPECT_LE(d, 1.0);
        }
    }
}

TEST(DeltaSi, EquallySimpleOutputsAreCompatible) {
    EXPECT_EQ(delta_si(BitString::from_text("01"), BitString::from_text("11"), n2()), 0.0);
}

TEST(DeltaSi, ZerosAndRandomBothFallBackAtThirtyTwoBits) {
    // No two-state halter within 1000 steps writes 32 cells, so both
    // strings cost their literal description and the gap vanishes.
    auto zeros = BitString(std::vector<std::uint8_t>(32, 0));
    EXPECT_TRUE(simplest_environment(zeros, n2()).fallback);
    EXPECT_EQ(delta_si(zeros, random_bits(32), n2()), 0.0);
}

TEST(DeltaSi, MachineOutputVersusUnproducedString) {
    // "0000" has a 19-bit generator; "0110" only its 5-bit literal table.
    EXPECT_EQ(delta_si(BitString::from_text("0000"), BitString::from_text("0110"), n2()), 1.0);
}

TEST(Cache, RoundTripThroughFile) {
    auto dir = temp_dir();
    auto path = (dir / cache_file_name({2, 1000})).string();
    EXPECT_EQ(cache_file_name({2, 1000}), "ctm-n2-s1000.bin");
    write_cache(path, n2());
    auto back = read_cache(path, MachineClass{2, 1000});
    EXPECT_EQ(back, n2());
    std::filesystem::remove_all(dir);
}

TEST(Cache, RejectsDamage) {
    auto bytes = serialize(n2());
    auto truncated = bytes;
    truncated.resize(bytes.size() / 2);
    EXPECT_THROW(deserialize(truncated), CacheError);
    EXPECT_THROW(deserialize({}), CacheError);
    for (std::size_t i = 0; i < bytes.size(); i += 37) {
        auto flipped = bytes;
        flipped[i] ^= 0x10;
        EXPECT_THROW(deserialize(flipped), CacheError) << "byte " << i;
    }
}

TEST(Cache, RejectsOtherClass) {
    auto bytes = serialize(enumerate({1, 1000}));
    EXPECT_NO_THROW(deserialize(bytes, MachineClass{1, 1000}));
    EXPECT_THROW(deserialize(bytes, MachineClass{1, 999}), CacheError);
    EXPECT_THROW(deserialize(bytes, MachineClass{2, 1000}), CacheError);
}

TEST(Cache, HeaderLayout) {
    auto bytes = serialize(enumerate({1, 1000}));
    ASSERT_GT(bytes.size(), 37u);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 6), "PWMCTM");
    EXPECT_EQ(bytes[6], 1); // version, little endian
    EXPECT_EQ(bytes[7], 0);
    EXPECT_EQ(bytes[8], 1); // n_states
    EXPECT_EQ(bytes[12], 1000 & 0xFF);
    EXPECT_EQ(bytes[13], 1000 >> 8);
}

TEST(Dyadic, ExactArithmetic) {
    auto a = Dyadic::power_of_half(3) + Dyadic::power_of_half(3);
    EXPECT_EQ(a, Dyadic::power_of_half(2));
    EXPECT_EQ(a.numerator(), 1);
    EXPECT_EQ(Dyadic(6, 4).to_string(), "3/2^3");
    EXPECT_LT(Dyadic::power_of_half(5), Dyadic::power_of_half(4));
    EXPECT_DOUBLE_EQ(Dyadic(3, 3).to_double(), 0.375);
    EXPECT_EQ(Dyadic(3, 2) * Dyadic(1, 1), Dyadic(3, 3));
}
