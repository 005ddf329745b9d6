#pragma once

// In-process execution of LET ... RETURN queries in the Cypher subset.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cm2cypher/cypher/ast.hpp"
#include "cm2cypher/cypher/eval.hpp"
#include "cm2cypher/cypher/lexer.hpp"
#include "cm2cypher/cypher/parser.hpp"
#include "cm2cypher/cypher/value.hpp"

namespace cm2cy::cypher {

// RETURN columns in declaration order.
class ResultRow {
public:
    void add(std::string alias, Value value) { columns_.emplace_back(std::move(alias), std::move(value)); }

    const std::vector<std::pair<std::string, Value>>& columns() const noexcept { return columns_; }
    std::size_t size() const noexcept { return columns_.size(); }

    const Value& at(std::string_view alias) const {
        for (const auto& [name, value] : columns_) {
            if (name == alias) return value;
        }
        throw Error("no column named '" + std::string(alias) + "'");
    }

    bool operator==(const ResultRow&) const = default;

private:
    std::vector<std::pair<std::string, Value>> columns_;
};

inline ResultRow run_query(const QueryAst& ast, const Parameters& parameters = {}) {
    Environment env;
    const Evaluator evaluator(parameters);
    for (const auto& binding : ast.bindings) env.push(binding.name, evaluator.eval(*binding.expr, env));
    ResultRow row;
    for (const auto& item : ast.items) row.add(item.alias, evaluator.eval(*item.expr, env));
    return row;
}

inline ResultRow run_query_text(std::string_view text, const Parameters& parameters = {}) {
    return run_query(parse_query(text), parameters);
}

// A single map-valued column prints as the map itself ({A:2, B:0, state:-1});
// otherwise the row prints as {alias: value, ...}.
inline std::string format_result(const ResultRow& row) {
    if (row.size() == 1 && row.columns().front().second.is_map()) return to_display(row.columns().front().second);
    std::string out = "{";
    bool first = true;
    for (const auto& [alias, value] : row.columns()) {
        if (!first) out += ", ";
        first = false;
        out += alias + ": " + to_display(value);
    }
    return out + "}";
}

inline Parameters parameters_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw CypherError(ErrorKind::TypeMismatch, "parameter document must be a JSON object");
    Parameters params;
    for (auto it = doc.begin(); it != doc.end(); ++it) params.emplace(it.key(), from_json(it.value()));
    return params;
}

}  // namespace cm2cy::cypher
