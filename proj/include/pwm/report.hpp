#pragma once

// Scenario file ingestion and report emission.
//
// Scenario file:
//   {"label": "...", "fields": [{"name": "...", "type": "uint"|"bool"|"bits"|"enum",
//                                "width": n, "cardinality": n, "value": ...}]}
//
// Reports are written with a fixed key order and every real number printed
// with 9 significant digits in lowercase e-notation, so identical runs give
// byte-identical output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "worldstate.hpp"

namespace pwm {

/// Malformed scenario file. `where` locates the problem ("file.json: fields[2] (speed)").
struct ScenarioError : Error {
    ScenarioError(std::string location, const std::string& what) : Error(location + ": " + what), where(std::move(location)) {}
    std::string where;
};

inline Scenario parse_scenario(const nlohmann::json& doc, const std::string& source) {
    if (!doc.is_object()) throw ScenarioError(source, "top level must be an object");
    Scenario s;
    if (auto it = doc.find("label"); it != doc.end()) {
        if (!it->is_string()) throw ScenarioError(source, "'label' must be a string");
        s.label = it->get<std::string>();
    } else {
        s.label = std::filesystem::path(source).stem().string();
    }
    auto fields = doc.find("fields");
    if (fields == doc.end() || !fields->is_array()) throw ScenarioError(source, "'fields' must be an array");

    for (std::size_t i = 0; i < fields->size(); ++i) {
        const auto& f = (*fields)[i];
        std::string where = source + ": fields[" + std::to_string(i) + "]";
        if (!f.is_object()) throw ScenarioError(where, "field must be an object");
        if (!f.contains("name") || !f["name"].is_string()) throw ScenarioError(where, "missing string 'name'");
        auto name = f["name"].get<std::string>();
        where += " (" + name + ")";
        if (!f.contains("type") || !f["type"].is_string()) throw ScenarioError(where, "missing string 'type'");
        if (!f.contains("value")) throw ScenarioError(where, "missing 'value'");
        auto type = f["type"].get<std::string>();
        const auto& v = f["value"];
        auto unsigned_member = [&](const char* key) -> std::uint64_t {
            if (!f.contains(key) || !f[key].is_number_unsigned()) {
                throw ScenarioError(where, std::string("'") + key + "' must be a non-negative integer");
            }
            return f[key].get<std::uint64_t>();
        };

        Field field{name, BoolValue{}};
        if (type == "uint") {
            auto width = unsigned_member("width");
            if (!v.is_number_unsigned()) throw ScenarioError(where, "uint value must be a non-negative integer");
            if (width == 0 || width > 64) throw ScenarioError(where, "uint width must be in [1, 64]");
            field.value = UintValue{static_cast<unsigned>(width), v.get<std::uint64_t>()};
        } else if (type == "bool") {
            if (!v.is_boolean()) throw ScenarioError(where, "bool value must be true or false");
            field.value = BoolValue{v.get<bool>()};
        } else if (type == "bits") {
            if (!v.is_string()) throw ScenarioError(where, "bits value must be a string of '0' and '1'");
            BitString bits;
            try {
                bits = BitString::from_text(v.get<std::string>());
            } catch (const std::invalid_argument& e) {
                throw ScenarioError(where, e.what());
            }
            if (f.contains("width") && unsigned_member("width") != bits.size()) {
                throw ScenarioError(where, "declared width " + std::to_string(f["width"].get<std::uint64_t>()) +
                                               " but value has " + std::to_string(bits.size()) + " bits");
            }
            field.value = BitsValue{std::move(bits)};
        } else if (type == "enum") {
            auto card = unsigned_member("cardinality");
            if (!v.is_number_unsigned()) throw ScenarioError(where, "enum value must be a symbol index");
            field.value = EnumValue{card, v.get<std::uint64_t>()};
        } else {
            throw ScenarioError(where, "unknown type '" + type + "' (expected uint, bool, bits or enum)");
        }
        try {
            detail::check_field(field);
        } catch (const FieldOverflow& e) {
            throw ScenarioError(where, e.what());
        }
        s.fields.push_back(std::move(field));
    }
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(path, "cannot open file");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError(path + ": byte " + std::to_string(e.byte), "invalid JSON");
    }
    return parse_scenario(doc, path);
}

inline nlohmann::ordered_json scenario_to_json(const Scenario& s) {
    nlohmann::ordered_json doc;
    doc["label"] = s.label;
    doc["fields"] = nlohmann::ordered_json::array();
    for (const auto& f : s.fields) {
        nlohmann::ordered_json j;
        j["name"] = f.name;
        j["type"] = to_string(f.kind());
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, UintValue>) {
                    j["width"] = v.width;
                    j["value"] = v.value;
                } else if constexpr (std::is_same_v<T, BoolValue>) {
                    j["value"] = v.value;
                } else if constexpr (std::is_same_v<T, BitsValue>) {
                    j["value"] = v.value.to_text();
                } else {
                    j["cardinality"] = v.cardinality;
                    j["value"] = v.index;
                }
            },
            f.value);
        doc["fields"].push_back(std::move(j));
    }
    return doc;
}

inline void save_scenario(const std::string& path, const Scenario& s) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << scenario_to_json(s).dump(2) << '\n';
}

/// 9 significant digits, lowercase e-notation.
inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8e", v);
    return buf;
}

/// Minimal pretty-printing JSON emitter with pinned number formatting.
class JsonWriter {
public:
    JsonWriter& begin_object() { return open('{'); }
    JsonWriter& end_object() { return close('}'); }
    JsonWriter& begin_array() { return open('['); }
    JsonWriter& end_array() { return close(']'); }

    JsonWriter& key(std::string_view k) {
        separator();
        out_ += quote(k) + ": ";
        after_key_ = true;
        return *this;
    }

    JsonWriter& value(double v) { return scalar(format_real(v)); }
    JsonWriter& value(bool v) { return scalar(v ? "true" : "false"); }
    JsonWriter& value(std::string_view v) { return scalar(quote(v)); }
    JsonWriter& value(const char* v) { return value(std::string_view(v)); }
    JsonWriter& value(const std::string& v) { return value(std::string_view(v)); }
    JsonWriter& null() { return scalar("null"); }

    template <typename I>
        requires std::is_integral_v<I> && (!std::is_same_v<I, bool>)
    JsonWriter& value(I v) {
        return scalar(std::to_string(v));
    }

    template <typename T>
    JsonWriter& field(std::string_view k, const T& v) {
        key(k);
        return value(v);
    }

    std::string str() const { return out_ + "\n"; }

private:
    JsonWriter& open(char c) {
        separator();
        out_ += c;
        first_.push_back(true);
        return *this;
    }
    JsonWriter& close(char c) {
        bool empty = first_.back();
        first_.pop_back();
        if (!empty) newline();
        out_ += c;
        return *this;
    }
    JsonWriter& scalar(const std::string& text) {
        separator();
        out_ += text;
        return *this;
    }
    void separator() {
        if (after_key_) {
            after_key_ = false;
            return;
        }
        if (first_.empty()) return;
        if (!first_.back()) out_ += ',';
        first_.back() = false;
        newline();
    }
    void newline() {
        out_ += '\n';
        out_.append(2 * first_.size(), ' ');
    }
    static std::string quote(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

    std::string out_;
    std::vector<bool> first_;
    bool after_key_ = false;
};

} // namespace pwm
