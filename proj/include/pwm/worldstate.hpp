#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bitstring.hpp"
#include "codes.hpp"
#include "errors.hpp"

namespace pwm {

struct UintValue {
    unsigned width = 0;
    std::uint64_t value = 0;
    friend bool operator==(const UintValue&, const UintValue&) = default;
};

struct BoolValue {
    bool value = false;
    friend bool operator==(const BoolValue&, const BoolValue&) = default;
};

struct BitsValue {
    BitString value;
    friend bool operator==(const BitsValue&, const BitsValue&) = default;
};

/// Index into an enumeration of `cardinality` symbols, in declaration order.
struct EnumValue {
    std::uint64_t cardinality = 1;
    std::uint64_t index = 0;
    friend bool operator==(const EnumValue&, const EnumValue&) = default;
};

using FieldValue = std::variant<UintValue, BoolValue, BitsValue, EnumValue>;

enum class FieldKind { Uint, Bool, Bits, Enum };

inline const char* to_string(FieldKind k) {
    switch (k) {
    case FieldKind::Uint: return "uint";
    case FieldKind::Bool: return "bool";
    case FieldKind::Bits: return "bits";
    case FieldKind::Enum: return "enum";
    }
    return "?";
}

struct Field {
    std::string name;
    FieldValue value;

    FieldKind kind() const { return static_cast<FieldKind>(value.index()); }
    friend bool operator==(const Field&, const Field&) = default;
};

/// Ordered list of typed fields. Field order is part of identity.
struct Scenario {
    std::string label;
    std::vector<Field> fields;
    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct ManifestEntry {
    std::string name;
    FieldKind kind = FieldKind::Bits;
    std::size_t offset = 0;
    std::size_t width = 0;
    std::uint64_t cardinality = 0; // enum fields only
    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// A digitalized scenario: canonical payload plus the map of where each field lives.
class WorldState {
public:
    WorldState() = default;

    /// Throws StructuralError unless every manifest region lies inside the
    /// payload and no two regions overlap.
    WorldState(std::string label, BitString payload, std::vector<ManifestEntry> manifest)
        : label_(std::move(label)), payload_(std::move(payload)), manifest_(std::move(manifest)) {
        validate();
    }

    /// A world-state with one raw "payload" field covering everything.
    static WorldState from_bits(std::string label, BitString bits) {
        std::vector<ManifestEntry> m;
        if (!bits.empty()) m.push_back({"payload", FieldKind::Bits, 0, bits.size(), 0});
        return WorldState(std::move(label), std::move(bits), std::move(m));
    }

    const std::string& label() const noexcept { return label_; }
    const BitString& payload() const noexcept { return payload_; }
    const std::vector<ManifestEntry>& manifest() const noexcept { return manifest_; }

    const ManifestEntry* find(std::string_view name) const {
        for (const auto& e : manifest_) {
            if (e.name == name) return &e;
        }
        return nullptr;
    }

    friend bool operator==(const WorldState&, const WorldState&) = default;

private:
    void validate() const {
        std::vector<std::pair<std::size_t, std::size_t>> spans;
        for (const auto& e : manifest_) {
            if (e.offset > payload_.size() || e.width > payload_.size() - e.offset) {
                throw StructuralError("manifest field '" + e.name + "' spans bits [" + std::to_string(e.offset) + ", " +
                                      std::to_string(e.offset + e.width) + ") but payload has " +
                                      std::to_string(payload_.size()) + " bits");
            }
            if (e.width > 0) spans.emplace_back(e.offset, e.offset + e.width);
        }
        std::sort(spans.begin(), spans.end());
        for (std::size_t i = 1; i < spans.size(); ++i) {
            if (spans[i].first < spans[i - 1].second) throw StructuralError("manifest regions overlap");
        }
    }

    std::string label_;
    BitString payload_;
    std::vector<ManifestEntry> manifest_;
};

namespace detail {

inline std::size_t field_width(const Field& f) {
    struct {
        std::size_t operator()(const UintValue& v) const { return v.width; }
        std::size_t operator()(const BoolValue&) const { return 1; }
        std::size_t operator()(const BitsValue& v) const { return v.value.size(); }
        std::size_t operator()(const EnumValue& v) const { return codes::index_width(v.cardinality); }
    } visitor;
    return std::visit(visitor, f.value);
}

inline void check_field(const Field& f) {
    if (const auto* u = std::get_if<UintValue>(&f.value)) {
        if (u->width == 0 || u->width > 64) throw FieldOverflow(f.name, "uint width must be in [1, 64]");
        if (u->width < 64 && (u->value >> u->width) != 0) {
            throw FieldOverflow(f.name, "value " + std::to_string(u->value) + " does not fit in " +
                                            std::to_string(u->width) + " bits");
        }
    } else if (const auto* e = std::get_if<EnumValue>(&f.value)) {
        if (e->cardinality == 0) throw FieldOverflow(f.name, "enum cardinality must be >= 1");
        if (e->index >= e->cardinality) {
            throw FieldOverflow(f.name, "symbol index " + std::to_string(e->index) + " outside cardinality " +
                                            std::to_string(e->cardinality));
        }
    }
}

} // namespace detail

/// Concatenates each field's fixed-width big-endian encoding in field order.
/// Throws FieldOverflow naming the first field whose value does not fit.
inline WorldState digitalize(const Scenario& s) {
    BitWriter w;
    std::vector<ManifestEntry> manifest;
    manifest.reserve(s.fields.size());
    for (const auto& f : s.fields) {
        detail::check_field(f);
        ManifestEntry entry{f.name, f.kind(), w.size(), detail::field_width(f), 0};
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, UintValue>) {
                    w.put_uint(v.value, v.width);
                } else if constexpr (std::is_same_v<T, BoolValue>) {
                    w.put(v.value ? 1U : 0U);
                } else if constexpr (std::is_same_v<T, BitsValue>) {
                    w.put(v.value);
                } else {
                    entry.cardinality = v.cardinality;
                    w.put_uint(v.index, codes::index_width(v.cardinality));
                }
            },
            f.value);
        manifest.push_back(std::move(entry));
    }
    return WorldState(s.label, std::move(w).finish(), std::move(manifest));
}

/// Exact inverse of digitalize. Throws StructuralError when the manifest does
/// not describe a decodable field layout over the payload.
inline Scenario undigitalize(const WorldState& ws) {
    Scenario s{ws.label(), {}};
    const auto& p = ws.payload();
    std::size_t expected_offset = 0;
    for (const auto& e : ws.manifest()) {
        if (e.offset > p.size() || e.width > p.size() - e.offset) {
            throw StructuralError("manifest field '" + e.name + "' exceeds payload bounds");
        }
        if (e.offset != expected_offset) throw StructuralError("manifest field '" + e.name + "' is not contiguous");
        expected_offset += e.width;
        switch (e.kind) {
        case FieldKind::Uint:
            if (e.width == 0 || e.width > 64) throw StructuralError("uint field '" + e.name + "' has bad width");
            s.fields.push_back({e.name, UintValue{static_cast<unsigned>(e.width), p.to_uint(e.offset, static_cast<unsigned>(e.width))}});
            break;
        case FieldKind::Bool:
            if (e.width != 1) throw StructuralError("bool field '" + e.name + "' must be 1 bit");
            s.fields.push_back({e.name, BoolValue{p[e.offset] == 1}});
            break;
        case FieldKind::Bits:
            s.fields.push_back({e.name, BitsValue{p.slice(e.offset, e.width)}});
            break;
        case FieldKind::Enum: {
            if (e.cardinality == 0 || codes::index_width(e.cardinality) != e.width) {
                throw StructuralError("enum field '" + e.name + "' width disagrees with cardinality");
            }
            auto idx = e.width == 0 ? 0 : p.to_uint(e.offset, static_cast<unsigned>(e.width));
            if (idx >= e.cardinality) throw StructuralError("enum field '" + e.name + "' index out of range");
            s.fields.push_back({e.name, EnumValue{e.cardinality, idx}});
            break;
        }
        }
    }
    if (expected_offset != p.size()) throw StructuralError("payload has bits not covered by the manifest");
    return s;
}

/// Length in bits of the self-delimiting prefix join() puts in front of x.
inline std::size_t join_overhead(std::size_t left_length) { return codes::gamma_length(left_length + 1); }

/// gamma(|x| + 1) ++ x ++ y. The +1 lets an empty left side be encoded.
inline BitString join(const BitString& x, const BitString& y) {
    BitWriter w;
    codes::put_gamma(w, x.size() + 1);
    w.put(x);
    w.put(y);
    return std::move(w).finish();
}

inline std::pair<BitString, BitString> split_join(const BitString& joined) {
    BitReader r(joined.bits());
    std::uint64_t len = 0;
    try {
        len = codes::get_gamma(r) - 1;
    } catch (const std::exception&) {
        throw StructuralError("joined string has no valid length prefix");
    }
    auto start = r.position();
    if (len > joined.size() - start) throw StructuralError("joined string shorter than its length prefix claims");
    return {joined.slice(start, len), joined.slice(start + len, joined.size() - start - len)};
}

} // namespace pwm
