#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cm2cypher/errors.hpp"

namespace cm2cy::cypher {

struct Position {
    std::size_t line = 0;
    std::size_t column = 0;

    bool valid() const noexcept { return line > 0; }
    bool operator==(const Position&) const = default;
};

enum class ErrorKind {
    Syntax,
    DivisionByZero,
    TypeMismatch,
    UnknownVariable,
    UnknownParameter,
    Overflow,
    UnsupportedFeature,
    InvalidArgument,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Syntax: return "SyntaxError";
        case ErrorKind::DivisionByZero: return "DivisionByZero";
        case ErrorKind::TypeMismatch: return "TypeMismatch";
        case ErrorKind::UnknownVariable: return "UnknownVariable";
        case ErrorKind::UnknownParameter: return "UnknownParameter";
        case ErrorKind::Overflow: return "Overflow";
        case ErrorKind::UnsupportedFeature: return "UnsupportedFeature";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Error";
}

class CypherError : public Error {
public:
    CypherError(ErrorKind kind, std::string message, Position pos = {})
        : Error(format(kind, message, pos)), kind_(kind), detail_(std::move(message)), pos_(pos) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }
    Position position() const noexcept { return pos_; }

private:
    static std::string format(ErrorKind kind, const std::string& message, Position pos) {
        std::string out = to_string(kind);
        if (pos.valid()) out += " at " + std::to_string(pos.line) + ":" + std::to_string(pos.column);
        return out + ": " + message;
    }

    ErrorKind kind_;
    std::string detail_;
    Position pos_;
};

// Immutable dynamic value. Lists and maps share their storage, so copying a
// Value is O(1).
class Value {
public:
    using List = std::vector<Value>;
    // Insertion-ordered, keys unique.
    using Map = std::vector<std::pair<std::string, Value>>;

    Value() = default;
    static Value boolean(bool b) { return Value(Storage(b)); }
    static Value integer(std::int64_t i) { return Value(Storage(i)); }
    static Value text(std::string s) { return Value(Storage(std::move(s))); }
    static Value list(List items) { return Value(Storage(std::make_shared<const List>(std::move(items)))); }
    static Value map(Map entries) { return Value(Storage(std::make_shared<const Map>(std::move(entries)))); }

    bool is_null() const noexcept { return std::holds_alternative<std::monostate>(v_); }
    bool is_bool() const noexcept { return std::holds_alternative<bool>(v_); }
    bool is_int() const noexcept { return std::holds_alternative<std::int64_t>(v_); }
    bool is_text() const noexcept { return std::holds_alternative<std::string>(v_); }
    bool is_list() const noexcept { return std::holds_alternative<ListPtr>(v_); }
    bool is_map() const noexcept { return std::holds_alternative<MapPtr>(v_); }

    bool as_bool() const { return std::get<bool>(v_); }
    std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
    const std::string& as_text() const { return std::get<std::string>(v_); }
    const List& as_list() const { return *std::get<ListPtr>(v_); }
    const Map& as_map() const { return *std::get<MapPtr>(v_); }

    // Null when the key is absent.
    Value get(std::string_view key) const {
        for (const auto& [k, v] : as_map()) {
            if (k == key) return v;
        }
        return {};
    }

    std::string type_name() const {
        switch (v_.index()) {
            case 0: return "NULL";
            case 1: return "BOOLEAN";
            case 2: return "INTEGER";
            case 3: return "STRING";
            case 4: return "LIST";
            default: return "MAP";
        }
    }

    // Structural equality: null equals null, maps compare order-insensitively.
    // This is the host-side equality; the `=` operator uses cypher_equals.
    friend bool operator==(const Value& x, const Value& y) {
        if (x.v_.index() != y.v_.index()) return false;
        if (x.is_list()) {
            const auto& l = x.as_list();
            const auto& r = y.as_list();
            return l.size() == r.size() && std::equal(l.begin(), l.end(), r.begin());
        }
        if (x.is_map()) {
            const auto& l = x.as_map();
            const auto& r = y.as_map();
            if (l.size() != r.size()) return false;
            for (const auto& [k, v] : l) {
                auto it = std::find_if(r.begin(), r.end(), [&](const auto& e) { return e.first == k; });
                if (it == r.end() || !(it->second == v)) return false;
            }
            return true;
        }
        return x.v_ == y.v_;
    }

private:
    using ListPtr = std::shared_ptr<const List>;
    using MapPtr = std::shared_ptr<const Map>;
    using Storage = std::variant<std::monostate, bool, std::int64_t, std::string, ListPtr, MapPtr>;

    explicit Value(Storage v) : v_(std::move(v)) {}

    Storage v_;
};

// Three-valued equality; nullopt stands for Cypher null.
inline std::optional<bool> cypher_equals(const Value& x, const Value& y) {
    if (x.is_null() || y.is_null()) return std::nullopt;
    if (x.is_list() && y.is_list()) {
        const auto& l = x.as_list();
        const auto& r = y.as_list();
        if (l.size() != r.size()) return false;
        bool unknown = false;
        for (std::size_t i = 0; i < l.size(); ++i) {
            const auto eq = cypher_equals(l[i], r[i]);
            if (eq == false) return false;
            if (!eq) unknown = true;
        }
        return unknown ? std::nullopt : std::optional<bool>(true);
    }
    if (x.is_map() && y.is_map()) {
        const auto& l = x.as_map();
        const auto& r = y.as_map();
        if (l.size() != r.size()) return false;
        bool unknown = false;
        for (const auto& [k, v] : l) {
            auto it = std::find_if(r.begin(), r.end(), [&](const auto& e) { return e.first == k; });
            if (it == r.end()) return false;
            const auto eq = cypher_equals(v, it->second);
            if (eq == false) return false;
            if (!eq) unknown = true;
        }
        return unknown ? std::nullopt : std::optional<bool>(true);
    }
    if (x.is_list() != y.is_list() || x.is_map() != y.is_map()) return false;
    return x == y;
}

inline std::string quote_text(std::string_view s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'' || c == '\\') out += '\\';
        out += c;
    }
    return out + "'";
}

// Canonical single-line rendering; map keys are sorted for display,
// e.g. {A:2, B:0, state:-1}.
inline std::string to_display(const Value& v) {
    if (v.is_null()) return "null";
    if (v.is_bool()) return v.as_bool() ? "true" : "false";
    if (v.is_int()) return std::to_string(v.as_int());
    if (v.is_text()) return quote_text(v.as_text());
    std::string out;
    if (v.is_list()) {
        out = "[";
        bool first = true;
        for (const auto& item : v.as_list()) {
            if (!first) out += ", ";
            first = false;
            out += to_display(item);
        }
        return out + "]";
    }
    auto entries = v.as_map();
    std::sort(entries.begin(), entries.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    out = "{";
    bool first = true;
    for (const auto& [k, item] : entries) {
        if (!first) out += ", ";
        first = false;
        out += k + ":" + to_display(item);
    }
    return out + "}";
}

inline Value from_json(const nlohmann::json& j) {
    switch (j.type()) {
        case nlohmann::json::value_t::null: return {};
        case nlohmann::json::value_t::boolean: return Value::boolean(j.get<bool>());
        case nlohmann::json::value_t::number_integer: return Value::integer(j.get<std::int64_t>());
        case nlohmann::json::value_t::number_unsigned: {
            const auto u = j.get<std::uint64_t>();
            if (u > static_cast<std::uint64_t>(INT64_MAX)) {
                throw CypherError(ErrorKind::Overflow, "parameter integer exceeds 64-bit range");
            }
            return Value::integer(static_cast<std::int64_t>(u));
        }
        case nlohmann::json::value_t::string: return Value::text(j.get<std::string>());
        case nlohmann::json::value_t::array: {
            Value::List items;
            for (const auto& e : j) items.push_back(from_json(e));
            return Value::list(std::move(items));
        }
        case nlohmann::json::value_t::object: {
            Value::Map entries;
            for (auto it = j.begin(); it != j.end(); ++it) entries.emplace_back(it.key(), from_json(it.value()));
            return Value::map(std::move(entries));
        }
        default:
            throw CypherError(ErrorKind::UnsupportedFeature, "floating-point and binary values are outside the subset");
    }
}

}  // namespace cm2cy::cypher
