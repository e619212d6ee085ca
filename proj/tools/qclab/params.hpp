#pragma once

// Typed experiment parameters. Values are kept in canonical string form so
// the manifest can echo exactly what a run used.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcollapse/csv.hpp"
#include "qcollapse/numerics.hpp"

namespace qclab {

enum class Kind { integer, real, boolean, text };

struct ParamSpec {
    std::string key;
    Kind kind = Kind::real;
    std::string default_value;
    std::string help;
    std::vector<std::string> choices = {};  // text only; empty accepts anything
};

inline std::string flag_name(const std::string& key) {
    std::string f = key;
    for (auto& c : f)
        if (c == '_') c = '-';
    return "--" + f;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Parses a whole string as a finite double; nullopt on any trailing junk.
inline std::optional<double> parse_real(const std::string& s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    const char* first = t.data();
    if (*first == '+') ++first;
    double v = 0;
    auto res = std::from_chars(first, t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

/// Nonnegative integer; exponent notation is accepted when the value is exact.
inline std::optional<std::uint64_t> parse_integer(const std::string& s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    std::uint64_t v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec == std::errc() && res.ptr == t.data() + t.size()) return v;
    const auto d = parse_real(t);
    if (!d || *d < 0 || *d > 9007199254740992.0 || std::floor(*d) != *d) return std::nullopt;
    return static_cast<std::uint64_t>(*d);
}

inline std::optional<bool> parse_boolean(const std::string& s) {
    const std::string t = trim(s);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    return std::nullopt;
}

/// Comma-separated list of reals.
inline std::optional<std::vector<double>> parse_real_list(const std::string& s) {
    std::vector<double> out;
    const std::string t = trim(s);
    if (t.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = t.find(',', start);
        const auto v = parse_real(t.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (!v) return std::nullopt;
        out.push_back(*v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

class ParamSet {
public:
    explicit ParamSet(const std::vector<ParamSpec>& specs) : specs_(specs) {
        for (const auto& s : specs_) values_[s.key] = s.default_value;
    }

    /// Returns an error message, or an empty string when accepted.
    std::string set(const std::string& key, const std::string& raw, const std::string& origin) {
        const ParamSpec* spec = find(key);
        if (!spec) return origin + ": unknown key '" + key + "'";
        const std::string v = trim(raw);
        switch (spec->kind) {
            case Kind::integer: {
                const auto x = parse_integer(v);
                if (!x) return origin + ": '" + key + "' expects a nonnegative integer, got '" + v + "'";
                values_[key] = std::to_string(*x);
                break;
            }
            case Kind::real: {
                const auto x = parse_real(v);
                if (!x) return origin + ": '" + key + "' expects a finite number, got '" + v + "'";
                values_[key] = qcollapse::format_double(*x);
                break;
            }
            case Kind::boolean: {
                const auto x = parse_boolean(v);
                if (!x) return origin + ": '" + key + "' expects true or false, got '" + v + "'";
                values_[key] = *x ? "true" : "false";
                break;
            }
            case Kind::text:
                if (!spec->choices.empty()) {
                    bool ok = false;
                    for (const auto& c : spec->choices) ok = ok || c == v;
                    if (!ok) {
                        std::string list;
                        for (const auto& c : spec->choices) list += (list.empty() ? "" : "|") + c;
                        return origin + ": '" + key + "' must be one of " + list + ", got '" + v + "'";
                    }
                }
                values_[key] = v;
                break;
        }
        explicit_[key] = true;
        return {};
    }

    std::uint64_t integer(const std::string& key) const { return *parse_integer(at(key)); }
    std::size_t size(const std::string& key) const { return static_cast<std::size_t>(integer(key)); }
    double real(const std::string& key) const { return *parse_real(at(key)); }
    bool boolean(const std::string& key) const { return at(key) == "true"; }
    const std::string& text(const std::string& key) const { return at(key); }
    bool is_set(const std::string& key) const { return explicit_.count(key) > 0; }

    const std::map<std::string, std::string>& values() const { return values_; }
    const std::vector<ParamSpec>& specs() const { return specs_; }

private:
    const ParamSpec* find(const std::string& key) const {
        for (const auto& s : specs_)
            if (s.key == key) return &s;
        return nullptr;
    }
    const std::string& at(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw std::logic_error("parameter '" + key + "' is not declared");
        return it->second;
    }

    std::vector<ParamSpec> specs_;
    std::map<std::string, std::string> values_;
    std::map<std::string, bool> explicit_;
};

}  // namespace qclab
