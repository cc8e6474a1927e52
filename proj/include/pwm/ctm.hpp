#pragma once

// Coding Theorem Method: exhaustive enumeration of small Turing machines as a
// computable stand-in for the universal distribution over environments.
//
// Machine model
//   - 2 symbols, n states (0 is the start state), one-way infinite tape,
//     blank symbol 0, head starts on cell 0
//   - each transition writes, moves, then enters the next state or HALT
//   - moving left on cell 0 leaves the head on cell 0
//   - a run that has not halted after step_budget transitions contributes nothing
//   - output is the tape from cell 0 through the rightmost cell the head visited
//
// Canonical encoding (K(w) is its exact length)
//   gamma(n), then for state 0..n-1 and read symbol 0,1:
//   write (1 bit), move (1 bit, 1 = right), next (index_width(n + 1) bits, n = HALT)
//
// Machine index i in [0, class_size) is read as mixed-radix digits, most
// significant first, with digit d -> write = d / (2(n+1)),
// move = (d / (n+1)) % 2, next = d % (n+1). Index order equals the order of
// the canonical encoding read as a binary number.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "bitstring.hpp"
#include "codes.hpp"
#include "dyadic.hpp"
#include "errors.hpp"
#include "xorshift.hpp"

namespace pwm::ctm {

enum class Move : std::uint8_t { Left = 0, Right = 1 };

struct Transition {
    std::uint8_t write = 0;
    Move move = Move::Right;
    unsigned next = 0; // == states means HALT
    friend bool operator==(const Transition&, const Transition&) = default;
};

inline std::uint64_t transitions_per_entry(unsigned states) { return 4ULL * (states + 1ULL); }

/// Number of machines with `states` states; saturates at UINT64_MAX.
inline std::uint64_t class_size(unsigned states) {
    std::uint64_t size = 1;
    auto radix = transitions_per_entry(states);
    for (unsigned i = 0; i < 2 * states; ++i) {
        if (size > UINT64_MAX / radix) return UINT64_MAX;
        size *= radix;
    }
    return size;
}

inline std::size_t encoding_length(unsigned states) {
    return codes::gamma_length(states) + 2ULL * states * (2 + codes::index_width(states + 1ULL));
}

class MachineSpec {
public:
    MachineSpec(unsigned states, std::vector<Transition> table) : states_(states), table_(std::move(table)) {
        if (states_ == 0) throw std::invalid_argument("machine needs at least one state");
        if (table_.size() != 2ULL * states_) throw std::invalid_argument("transition table must cover every (state, symbol)");
        for (const auto& t : table_) {
            if (t.write > 1 || t.next > states_) throw std::invalid_argument("transition out of range");
        }
    }

    static MachineSpec from_index(unsigned states, std::uint64_t index) {
        auto radix = transitions_per_entry(states);
        if (index >= class_size(states)) throw std::out_of_range("machine index outside class");
        std::vector<Transition> table(2ULL * states);
        for (auto i = table.size(); i-- > 0;) {
            auto d = index % radix;
            index /= radix;
            table[i] = {static_cast<std::uint8_t>(d / (2 * (states + 1))),
                        static_cast<Move>((d / (states + 1)) % 2), static_cast<unsigned>(d % (states + 1))};
        }
        return MachineSpec(states, std::move(table));
    }

    unsigned states() const noexcept { return states_; }
    const std::vector<Transition>& table() const noexcept { return table_; }
    const Transition& at(unsigned state, unsigned symbol) const { return table_[2ULL * state + symbol]; }

    std::uint64_t index() const {
        auto radix = transitions_per_entry(states_);
        std::uint64_t idx = 0;
        for (const auto& t : table_) {
            idx = idx * radix + t.write * 2ULL * (states_ + 1) + static_cast<unsigned>(t.move) * (states_ + 1ULL) + t.next;
        }
        return idx;
    }

    BitString encoding() const {
        BitWriter w;
        codes::put_gamma(w, states_);
        auto next_width = codes::index_width(states_ + 1ULL);
        for (const auto& t : table_) {
            w.put(t.write);
            w.put(static_cast<unsigned>(t.move));
            w.put_uint(t.next, next_width);
        }
        return std::move(w).finish();
    }

    std::size_t encoding_bits() const { return encoding_length(states_); }

    friend bool operator==(const MachineSpec&, const MachineSpec&) = default;

private:
    unsigned states_;
    std::vector<Transition> table_;
};

/// Runs from a blank tape. Returns the output if the machine halts within budget.
inline std::optional<BitString> run(const MachineSpec& m, std::uint64_t step_budget) {
    std::vector<std::uint8_t> tape(1, 0);
    std::size_t head = 0;
    unsigned state = 0;
    for (std::uint64_t step = 0; step < step_budget; ++step) {
        const auto& t = m.at(state, tape[head]);
        tape[head] = t.write;
        if (t.move == Move::Right) {
            if (++head == tape.size()) tape.push_back(0);
        } else if (head > 0) {
            --head;
        }
        if (t.next == m.states()) return BitString(std::move(tape));
        state = t.next;
    }
    return std::nullopt;
}

struct MachineClass {
    unsigned states = 2;
    std::uint64_t step_budget = 1000;
    friend bool operator==(const MachineClass&, const MachineClass&) = default;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 26;

/// Bits added to a string to turn it into a literal-table program.
inline constexpr std::size_t kLiteralOverhead = 1;

/// Aggregate of every enumerated machine that produced one output.
struct OutputStats {
    Dyadic weight;                // sum of 2^-K(w)
    std::uint64_t machines = 0;   // how many produced it
    std::uint64_t first_machine = 0; // lowest index, i.e. lowest canonical encoding
    friend bool operator==(const OutputStats&, const OutputStats&) = default;
};

class CtmDistribution {
public:
    CtmDistribution() = default;
    CtmDistribution(MachineClass cls, std::map<BitString, OutputStats> outputs, bool complete)
        : cls_(cls), outputs_(std::move(outputs)), complete_(complete) {}

    const MachineClass& machine_class() const noexcept { return cls_; }
    const std::map<BitString, OutputStats>& outputs() const noexcept { return outputs_; }
    bool complete() const noexcept { return complete_; }

    const OutputStats* find(const BitString& x) const {
        auto it = outputs_.find(x);
        return it == outputs_.end() ? nullptr : &it->second;
    }

    std::uint64_t halting_machines() const {
        std::uint64_t total = 0;
        for (const auto& [out, s] : outputs_) total += s.machines;
        return total;
    }

    /// Total algorithmic probability of x over the class (zero if never produced).
    Dyadic total_weight(const BitString& x) const {
        const auto* s = find(x);
        return s ? s->weight : Dyadic{};
    }

    friend bool operator==(const CtmDistribution&, const CtmDistribution&) = default;

private:
    MachineClass cls_;
    std::map<BitString, OutputStats> outputs_;
    bool complete_ = false;
};

struct EnumerateOptions {
    std::uint64_t cap = kDefaultEnumerationCap;
    unsigned threads = 0; // 0 = hardware concurrency
    /// Visit machine indices in a seeded random order. Testing aid; the
    /// result does not depend on it.
    std::optional<std::uint64_t> shuffle_seed;
    bool reverse = false;
};

namespace detail {

inline void merge_into(std::map<BitString, OutputStats>& into, const BitString& out, const OutputStats& s) {
    auto [it, inserted] = into.try_emplace(out, s);
    if (!inserted) {
        it->second.weight += s.weight;
        it->second.machines += s.machines;
        it->second.first_machine = std::min(it->second.first_machine, s.first_machine);
    }
}

} // namespace detail

/// Runs every machine of the class and tallies halting outputs.
/// Throws CapExceeded when the class is larger than options.cap.
inline CtmDistribution enumerate(MachineClass cls, const EnumerateOptions& options = {}) {
    if (cls.states == 0) throw std::invalid_argument("enumerate: n_states must be >= 1");
    if (cls.step_budget == 0) throw std::invalid_argument("enumerate: step_budget must be >= 1");
    auto size = class_size(cls.states);
    if (size > options.cap) {
        throw CapExceeded("machine class with " + std::to_string(cls.states) + " states has " +
                          (size == UINT64_MAX ? std::string("more than 2^64") : std::to_string(size)) +
                          " machines, above the enumeration cap of " + std::to_string(options.cap));
    }

    std::vector<std::uint64_t> order;
    if (options.shuffle_seed || options.reverse) {
        order.resize(size);
        std::iota(order.begin(), order.end(), std::uint64_t{0});
        if (options.reverse) std::reverse(order.begin(), order.end());
        if (options.shuffle_seed) {
            Xorshift64 rng(*options.shuffle_seed);
            for (auto i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        }
    }
    auto machine_at = [&](std::uint64_t k) { return order.empty() ? k : order[k]; };

    const auto weight = Dyadic::power_of_half(static_cast<std::int64_t>(encoding_length(cls.states)));
    unsigned threads = options.threads ? options.threads : std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(1, size / 4096)));

    std::vector<std::map<BitString, OutputStats>> partial(threads);
    auto work = [&](unsigned part) {
        auto begin = size * part / threads;
        auto end = size * (part + 1) / threads;
        // counts first, exact weights once per distinct output
        std::map<BitString, OutputStats> local;
        for (auto k = begin; k < end; ++k) {
            auto idx = machine_at(k);
            auto out = run(MachineSpec::from_index(cls.states, idx), cls.step_budget);
            if (!out) continue;
            auto [it, inserted] = local.try_emplace(std::move(*out), OutputStats{{}, 1, idx});
            if (!inserted) {
                it->second.machines += 1;
                it->second.first_machine = std::min(it->second.first_machine, idx);
            }
        }
        for (auto& [out, s] : local) s.weight = Dyadic(s.machines, 0) * weight;
        partial[part] = std::move(local);
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    }

    std::map<BitString, OutputStats> merged;
    for (const auto& p : partial) {
        for (const auto& [out, s] : p) detail::merge_into(merged, out, s);
    }
    return CtmDistribution(cls, std::move(merged), true);
}

/// The simplest environment for a string: the enumerated machine of least
/// encoding length (ties: lowest encoding) that produces it, or the
/// literal-table program when none does.
struct EnvironmentMatch {
    std::optional<MachineSpec> machine;
    std::size_t description_bits = 0; // -log2(weight)
    bool fallback = false;

    Dyadic weight() const { return Dyadic::power_of_half(static_cast<std::int64_t>(description_bits)); }
};

inline EnvironmentMatch simplest_environment(const BitString& x, const CtmDistribution& d) {
    if (const auto* s = d.find(x)) {
        auto m = MachineSpec::from_index(d.machine_class().states, s->first_machine);
        auto bits = m.encoding_bits();
        return {std::move(m), bits, false};
    }
    return {std::nullopt, x.size() + kLiteralOverhead, true};
}

/// |log2 SI(x) - log2 SI(y)| / (max(|x|, |y|) + literal overhead), capped at 1.
/// Zero exactly when both strings' simplest environments are equally simple.
inline double delta_si(const BitString& x, const BitString& y, const CtmDistribution& d) {
    auto ex = simplest_environment(x, d);
    auto ey = simplest_environment(y, d);
    auto gap = ex.description_bits > ey.description_bits ? ex.description_bits - ey.description_bits
                                                         : ey.description_bits - ex.description_bits;
    auto scale = static_cast<double>(std::max(x.size(), y.size()) + kLiteralOverhead);
    return std::min(1.0, static_cast<double>(gap) / scale);
}

// ---------------------------------------------------------------------------
// Cache file
//
//   "PWMCTM" u16 format_version
//   u32 n_states  u64 step_budget  u64 class_hash  u8 complete  u64 record_count
//   record_count x { u32 bit_length, packed bits (MSB first, zero padded),
//                    u64 machines, u64 first_machine,
//                    u32 numerator_bytes, numerator (big endian), i64 exponent }
//   u64 FNV-1a checksum of every preceding byte
//
// Integers are little endian. Records are sorted by output (shortlex).

inline constexpr char kCacheMagic[6] = {'P', 'W', 'M', 'C', 'T', 'M'};
inline constexpr std::uint16_t kCacheVersion = 1;

inline std::uint64_t fnv1a(const std::uint8_t* data, std::size_t n, std::uint64_t h = 1469598103934665603ULL) {
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t class_hash(const MachineClass& cls) {
    std::string key = "pwm-ctm/v" + std::to_string(kCacheVersion) + "/symbols=2/tape=one-way/blank=0/states=" +
                      std::to_string(cls.states) + "/budget=" + std::to_string(cls.step_budget);
    return fnv1a(reinterpret_cast<const std::uint8_t*>(key.data()), key.size());
}

namespace detail {

class ByteWriter {
public:
    template <typename T>
    void le(T v) {
        for (std::size_t i = 0; i < sizeof(T); ++i) bytes.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i)));
    }
    void raw(const void* p, std::size_t n) {
        auto b = static_cast<const std::uint8_t*>(p);
        bytes.insert(bytes.end(), b, b + n);
    }
    std::vector<std::uint8_t> bytes;
};

class ByteReader {
public:
    explicit ByteReader(const std::vector<std::uint8_t>& b) : bytes_(b) {}
    template <typename T>
    T le() {
        need(sizeof(T));
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
        return static_cast<T>(v);
    }
    const std::uint8_t* take(std::size_t n) {
        need(n);
        auto p = bytes_.data() + pos_;
        pos_ += n;
        return p;
    }
    std::size_t position() const { return pos_; }

private:
    void need(std::size_t n) const {
        if (n > bytes_.size() - pos_) throw CacheError("cache file truncated");
    }
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline std::vector<std::uint8_t> serialize(const CtmDistribution& d) {
    detail::ByteWriter w;
    w.raw(kCacheMagic, sizeof kCacheMagic);
    w.le<std::uint16_t>(kCacheVersion);
    w.le<std::uint32_t>(d.machine_class().states);
    w.le<std::uint64_t>(d.machine_class().step_budget);
    w.le<std::uint64_t>(class_hash(d.machine_class()));
    w.le<std::uint8_t>(d.complete() ? 1 : 0);
    w.le<std::uint64_t>(d.outputs().size());
    for (const auto& [out, s] : d.outputs()) {
        w.le<std::uint32_t>(static_cast<std::uint32_t>(out.size()));
        std::vector<std::uint8_t> packed((out.size() + 7) / 8, 0);
        for (std::size_t i = 0; i < out.size(); ++i) packed[i / 8] |= static_cast<std::uint8_t>(out[i] << (7 - i % 8));
        w.raw(packed.data(), packed.size());
        w.le<std::uint64_t>(s.machines);
        w.le<std::uint64_t>(s.first_machine);
        std::vector<std::uint8_t> num;
        boost::multiprecision::export_bits(s.weight.numerator(), std::back_inserter(num), 8);
        w.le<std::uint32_t>(static_cast<std::uint32_t>(num.size()));
        w.raw(num.data(), num.size());
        w.le<std::int64_t>(s.weight.exponent());
    }
    w.le<std::uint64_t>(fnv1a(w.bytes.data(), w.bytes.size()));
    return std::move(w.bytes);
}

/// Parses and verifies a cache image. When `expected` is given, a cache for
/// any other machine class is rejected.
inline CtmDistribution deserialize(const std::vector<std::uint8_t>& bytes,
                                   const std::optional<MachineClass>& expected = std::nullopt) {
    if (bytes.size() < sizeof kCacheMagic + 2 + 8) throw CacheError("cache file truncated");
    auto body = bytes.size() - 8;
    std::uint64_t stored = 0;
    for (int i = 0; i < 8; ++i) stored |= static_cast<std::uint64_t>(bytes[body + i]) << (8 * i);
    if (fnv1a(bytes.data(), body) != stored) throw CacheError("cache checksum mismatch (file corrupt or truncated)");

    detail::ByteReader r(bytes);
    if (std::memcmp(r.take(sizeof kCacheMagic), kCacheMagic, sizeof kCacheMagic) != 0) throw CacheError("not a CTM cache file");
    if (r.le<std::uint16_t>() != kCacheVersion) throw CacheError("unsupported cache format version");
    MachineClass cls;
    cls.states = r.le<std::uint32_t>();
    cls.step_budget = r.le<std::uint64_t>();
    if (r.le<std::uint64_t>() != class_hash(cls)) throw CacheError("machine-class hash mismatch");
    if (expected && !(*expected == cls)) throw CacheError("cache is for a different machine class");
    bool complete = r.le<std::uint8_t>() != 0;
    auto count = r.le<std::uint64_t>();
    std::map<BitString, OutputStats> outputs;
    for (std::uint64_t k = 0; k < count; ++k) {
        auto len = r.le<std::uint32_t>();
        auto packed = r.take((len + 7) / 8);
        std::vector<std::uint8_t> bits(len);
        for (std::size_t i = 0; i < len; ++i) bits[i] = (packed[i / 8] >> (7 - i % 8)) & 1U;
        OutputStats s;
        s.machines = r.le<std::uint64_t>();
        s.first_machine = r.le<std::uint64_t>();
        auto nbytes = r.le<std::uint32_t>();
        auto num = r.take(nbytes);
        Dyadic::Int n;
        boost::multiprecision::import_bits(n, num, num + nbytes, 8);
        s.weight = Dyadic(n, r.le<std::int64_t>());
        outputs.emplace(BitString(std::move(bits)), std::move(s));
    }
    if (r.position() != body) throw CacheError("trailing bytes in cache file");
    return CtmDistribution(cls, std::move(outputs), complete);
}

inline std::string cache_file_name(const MachineClass& cls) {
    return "ctm-n" + std::to_string(cls.states) + "-s" + std::to_string(cls.step_budget) + ".bin";
}

inline void write_cache(const std::string& path, const CtmDistribution& d) {
    auto bytes = serialize(d);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw CacheError("cannot write cache file " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw CacheError("failed writing cache file " + path);
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw CacheError("cannot open cache file " + path);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline CtmDistribution read_cache(const std::string& path, const std::optional<MachineClass>& expected = std::nullopt) {
    return deserialize(read_file_bytes(path), expected);
}

} // namespace pwm::ctm
