#pragma once

// Bit-level compressors backing the complexity estimators.
//
// Each *_encode returns a bare payload; the surrounding format tag and
// literal-fallback flag are added by estimators.hpp. Payloads are
// self-terminating given their own length, so a decoder needs nothing but
// the payload bits.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "bitstring.hpp"
#include "codes.hpp"
#include "errors.hpp"

namespace pwm::compress {

// ---------------------------------------------------------------------------
// RLE: first bit, then Elias-gamma run lengths of alternating runs.

inline BitString rle_encode(const BitString& x) {
    BitWriter w;
    if (x.empty()) return std::move(w).finish();
    w.put(x[0]);
    std::size_t run = 1;
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (x[i] == x[i - 1]) {
            ++run;
        } else {
            codes::put_gamma(w, run);
            run = 1;
        }
    }
    codes::put_gamma(w, run);
    return std::move(w).finish();
}

inline BitString rle_decode(const BitString& payload) {
    BitWriter out;
    if (payload.empty()) return std::move(out).finish();
    BitReader r(payload.bits());
    unsigned bit = r.get();
    while (!r.exhausted()) {
        auto run = codes::get_gamma(r);
        for (std::uint64_t i = 0; i < run; ++i) out.put(bit);
        bit ^= 1U;
    }
    return std::move(out).finish();
}

// ---------------------------------------------------------------------------
// LZ78 over the binary alphabet. Each token is the index of the longest known
// phrase, written in index_width(dictionary size) bits, followed by the next
// input bit. Index 0 is the empty phrase. A trailing phrase with no following
// bit is written as a bare index and recognised by end of payload.

inline BitString lz78_encode(const BitString& x) {
    struct Node {
        std::array<std::int32_t, 2> child{-1, -1};
    };
    std::vector<Node> trie(1);
    BitWriter w;
    std::size_t i = 0;
    while (i < x.size()) {
        std::size_t node = 0;
        while (i < x.size() && trie[node].child[x[i]] >= 0) node = static_cast<std::size_t>(trie[node].child[x[i++]]);
        w.put_uint(node, codes::index_width(trie.size()));
        if (i == x.size()) break;
        trie[node].child[x[i]] = static_cast<std::int32_t>(trie.size());
        trie.emplace_back();
        w.put(x[i++]);
    }
    return std::move(w).finish();
}

inline BitString lz78_decode(const BitString& payload) {
    // phrase k = phrase[parent[k]] + last[k]
    std::vector<std::size_t> parent{0};
    std::vector<std::uint8_t> last{0};
    BitWriter out;
    BitReader r(payload.bits());
    auto emit = [&](std::size_t k) {
        std::vector<std::uint8_t> rev;
        while (k != 0) {
            rev.push_back(last[k]);
            k = parent[k];
        }
        for (auto it = rev.rbegin(); it != rev.rend(); ++it) out.put(*it);
    };
    while (!r.exhausted()) {
        auto k = r.get_uint(codes::index_width(parent.size()));
        if (k >= parent.size()) throw StructuralError("LZ78: phrase index out of range");
        emit(k);
        if (r.exhausted()) break;
        auto b = static_cast<std::uint8_t>(r.get());
        out.put(b);
        parent.push_back(k);
        last.push_back(b);
    }
    return std::move(out).finish();
}

// ---------------------------------------------------------------------------
// LZ77 over bits, whole-input window.
//
// Stream: repeated (literal run, match) pairs.
//   literal run: delta(count + 1), then `count` raw bits
//   match:       (offset - 1) in index_width(position) bits, then delta(length)
// Either part may be the last thing in the stream. Matches may overlap the
// bits they produce, so periodic input collapses to one literal period plus
// one match.

namespace detail {

inline constexpr unsigned kLz77HashBits = 12;
inline constexpr std::size_t kLz77ChainLimit = 256;
inline constexpr std::size_t kLz77Lookahead = 64;

struct Match {
    std::size_t length = 0;
    std::size_t offset = 0;
};

} // namespace detail

inline BitString lz77_encode(const BitString& x) {
    const std::size_t n = x.size();
    const auto k = detail::kLz77HashBits;
    // head[h] = most recent position whose k-gram hashes to h; prev chains older ones
    std::vector<std::int64_t> head(std::size_t{1} << k, -1);
    std::vector<std::int64_t> prev(n, -1);
    std::vector<std::uint32_t> gram(n, 0);
    if (n >= k) {
        std::uint32_t g = 0;
        for (std::size_t i = 0; i < n; ++i) {
            g = ((g << 1) | x[i]) & ((1U << k) - 1);
            if (i + 1 >= k) gram[i + 1 - k] = g;
        }
    }
    std::size_t indexed = 0; // positions [0, indexed) are in the hash chains
    auto index_up_to = [&](std::size_t limit) {
        for (; indexed < limit && indexed + k <= n; ++indexed) {
            prev[indexed] = head[gram[indexed]];
            head[gram[indexed]] = static_cast<std::int64_t>(indexed);
        }
        indexed = std::max(indexed, limit);
    };
    auto longest = [&](std::size_t pos) {
        detail::Match best;
        if (pos + k > n) return best;
        index_up_to(pos);
        std::size_t steps = 0;
        for (auto j = head[gram[pos]]; j >= 0 && steps < detail::kLz77ChainLimit; j = prev[static_cast<std::size_t>(j)]) {
            auto src = static_cast<std::size_t>(j);
            if (src >= pos) continue; // indexed ahead by a lookahead probe
            ++steps;
            std::size_t len = 0;
            while (pos + len < n && x[src + len] == x[pos + len]) ++len;
            if (len > best.length) {
                best = {len, pos - src};
                if (pos + len == n) break;
            }
        }
        return best;
    };
    // Bits saved by coding [pos, pos+len) as a match instead of literals. A
    // match that ends before the input does usually forces one more literal
    // run header, charged at its worst case.
    auto gain = [&](std::size_t pos, const detail::Match& m) -> std::int64_t {
        if (m.length == 0) return 0;
        auto cost = codes::index_width(pos) + codes::delta_length(m.length);
        auto end = pos + m.length;
        if (end < n) cost += codes::delta_length(n - end + 1);
        return static_cast<std::int64_t>(m.length) - static_cast<std::int64_t>(cost);
    };

    BitWriter w;
    std::size_t pos = 0;
    std::size_t run_start = 0;
    auto flush_literals = [&](std::size_t end) {
        codes::put_delta(w, end - run_start + 1);
        for (std::size_t i = run_start; i < end; ++i) w.put(x[i]);
    };
    while (pos < n) {
        auto m = longest(pos);
        auto g = gain(pos, m);
        if (g <= 0) {
            ++pos;
            continue;
        }
        // lazy matching: give way to a more profitable match starting shortly after
        bool defer = false;
        auto horizon = std::min({pos + m.length, pos + detail::kLz77Lookahead, n});
        for (auto q = pos + 1; q < horizon && !defer; ++q) defer = gain(q, longest(q)) > g;
        if (defer) {
            ++pos;
            continue;
        }
        flush_literals(pos);
        w.put_uint(m.offset - 1, codes::index_width(pos));
        codes::put_delta(w, m.length);
        pos += m.length;
        run_start = pos;
    }
    if (run_start < n) flush_literals(n);
    return std::move(w).finish();
}

inline BitString lz77_decode(const BitString& payload) {
    std::vector<std::uint8_t> out;
    BitReader r(payload.bits());
    while (!r.exhausted()) {
        auto count = codes::get_delta(r) - 1;
        for (std::uint64_t i = 0; i < count; ++i) out.push_back(static_cast<std::uint8_t>(r.get()));
        if (r.exhausted()) break;
        if (out.empty()) throw StructuralError("LZ77: match before any output");
        auto offset = r.get_uint(codes::index_width(out.size())) + 1;
        auto length = codes::get_delta(r);
        if (offset > out.size()) throw StructuralError("LZ77: offset beyond output");
        auto src = out.size() - offset;
        for (std::uint64_t i = 0; i < length; ++i) out.push_back(out[src + i]);
    }
    return BitString(std::move(out));
}

// ---------------------------------------------------------------------------
// Order-0 adaptive (Laplace, counts start at 1) ideal code length in bits.

inline double entropy0_ideal_bits(const BitString& x) {
    std::array<double, 2> count{1.0, 1.0};
    double bits = 0.0;
    for (auto b : x.bits()) {
        bits -= std::log2(count[b] / (count[0] + count[1]));
        count[b] += 1.0;
    }
    return bits;
}

/// delta(n + 1) length header plus the ideal code length rounded up.
inline double entropy0_payload_bits(const BitString& x) {
    return static_cast<double>(codes::delta_length(x.size() + 1)) + std::ceil(entropy0_ideal_bits(x) - 1e-9);
}

} // namespace pwm::compress
