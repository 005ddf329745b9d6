#pragma once

// Generators for the three Cypher 25 forms of a two-counter machine:
//   Reduce        a single LET ... RETURN query folding the machine in reduce()
//   Transactions  CREATE / UNWIND ... CALL { ... } IN TRANSACTIONS stepper / readback
//   Qpp           a state graph plus a quantified-path traversal pruned by allReduce
//
// Output uses a fixed house layout (2-space indent, one clause per line).
// Only whitespace differs from the hand-wrapped listings these forms come
// from, so comparisons against them go through normalized_tokens().

#include <cstdint>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cm2cypher/cypher/lexer.hpp"
#include "cm2cypher/cypher/value.hpp"
#include "cm2cypher/frontend.hpp"
#include "cm2cypher/machine.hpp"

namespace cm2cy {

inline constexpr const char* kDialectHeader = "CYPHER 25";
inline constexpr std::int64_t kDefaultMaxSteps = 1'000'000;
inline constexpr std::int64_t kDefaultMaxPath = std::numeric_limits<std::int64_t>::max();

enum class Approach { Reduce, Transactions, Qpp };

struct CypherQuery {
    Approach approach;
    std::string text;
    std::string dialect_header = kDialectHeader;
};

struct ScriptBundle {
    std::vector<std::pair<std::string, CypherQuery>> queries;

    const CypherQuery& at(const std::string& label) const {
        for (const auto& [l, q] : queries) {
            if (l == label) return q;
        }
        throw Error("no query labelled '" + label + "'");
    }
};

namespace detail {

// One instruction as a single-quoted Cypher map literal.
inline std::string cypher_map_entry(const ProgramDocument& entry) {
    std::string out = "{";
    bool first = true;
    for (auto it = entry.begin(); it != entry.end(); ++it) {
        if (!first) out += ", ";
        first = false;
        out += it.key() + ": ";
        out += it.value().is_string() ? cypher::quote_text(it.value().get<std::string>()) : it.value().dump();
    }
    return out + "}";
}

inline std::string program_list_literal(const Program& program) {
    const auto doc = to_program_document(program);
    std::string out = "[\n";
    for (std::size_t i = 0; i < doc.size(); ++i) {
        out += "  " + cypher_map_entry(doc[i]);
        out += i + 1 < doc.size() ? ",\n" : "\n";
    }
    return out + "]";
}

}  // namespace detail

inline CypherQuery gen_reduce_query(const Program& program, std::int64_t max_steps = kDefaultMaxSteps) {
    if (max_steps < 1) throw ValidationError("max_steps must be at least 1");
    std::ostringstream q;
    q << kDialectHeader << "\n"
      << "LET program = " << detail::program_list_literal(program) << "\n"
      << "LET max_steps = " << max_steps << "\n"
      << "\n"
      << R"(LET result = reduce(
  machine = {state: 0, A: 0, B: 0},
  step IN range(1, max_steps) |
  CASE WHEN machine.state = -1
    THEN machine
  ELSE
    head([instr IN [program[machine.state]] |
      CASE instr.op
        WHEN 'INC' THEN
          CASE instr.counter
            WHEN 'A' THEN
              {state: instr.next, A: machine.A + 1, B: machine.B}
            WHEN 'B' THEN
              {state: instr.next, A: machine.A, B: machine.B + 1}
          END
        WHEN 'JZDEC' THEN
          CASE instr.counter
            WHEN 'A' THEN
              CASE WHEN machine.A = 0
                THEN {state: instr.q_zero, A: 0, B: machine.B}
                ELSE {state: instr.q_pos, A: machine.A - 1, B: machine.B}
              END
            WHEN 'B' THEN
              CASE WHEN machine.B = 0
                THEN {state: instr.q_zero, A: machine.A, B: 0}
                ELSE {state: instr.q_pos, A: machine.A, B: machine.B - 1}
              END
          END
        WHEN 'HALT' THEN
          {state: -1, A: machine.A, B: machine.B}
      END
    ])
  END
)
RETURN result
)";
    return {Approach::Reduce, q.str()};
}

struct TransactionsOptions {
    // Reference the program as $program instead of inlining it with LET.
    bool parameter_mode = false;
};

inline ScriptBundle gen_transactions_script(const Program& program, TransactionsOptions options = {}) {
    ScriptBundle bundle;
    bundle.queries.emplace_back(
        "setup", CypherQuery{Approach::Transactions,
                             std::string(kDialectHeader) + "\nCREATE (:Machine {state: 0, A: 0, B: 0});\n"});

    std::ostringstream q;
    q << kDialectHeader << "\n";
    if (!options.parameter_mode) q << "LET program = " << detail::program_list_literal(program) << "\n\n";
    const char* program_ref = options.parameter_mode ? "$program" : "program";
    q << R"(UNWIND range(1, 9223372036854775807) AS step
CALL (step) {
  MATCH (m:Machine)
  WITH m,
    CASE WHEN m.state = -1 THEN 1/0
         ELSE )" << program_ref << R"([m.state]
    END AS instr
  SET m.state = CASE instr.op
    WHEN 'INC' THEN instr.next
    WHEN 'JZDEC' THEN
      CASE instr.counter
        WHEN 'A' THEN
          CASE WHEN m.A = 0
            THEN instr.q_zero
            ELSE instr.q_pos END
        WHEN 'B' THEN
          CASE WHEN m.B = 0
            THEN instr.q_zero
            ELSE instr.q_pos END
      END
    WHEN 'HALT' THEN -1
    END,
  m.A = CASE
    WHEN instr.op = 'INC'
      AND instr.counter = 'A'
      THEN m.A + 1
    WHEN instr.op = 'JZDEC'
      AND instr.counter = 'A'
      AND m.A > 0 THEN m.A - 1
    ELSE m.A END,
  m.B = CASE
    WHEN instr.op = 'INC'
      AND instr.counter = 'B'
      THEN m.B + 1
    WHEN instr.op = 'JZDEC'
      AND instr.counter = 'B'
      AND m.B > 0 THEN m.B - 1
    ELSE m.B END
} IN TRANSACTIONS OF 1 ROW
  ON ERROR BREAK
)";
    bundle.queries.emplace_back("main", CypherQuery{Approach::Transactions, q.str()});
    bundle.queries.emplace_back(
        "read", CypherQuery{Approach::Transactions, "// Read result:\nMATCH (m:Machine) RETURN m;\n", ""});
    return bundle;
}

// Parameter document for the $program form of the stepper.
inline nlohmann::ordered_json transactions_parameters(const Program& program) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    doc["program"] = to_program_document(program);
    return doc;
}

inline CypherQuery gen_qpp_setup(const Program& program) {
    std::ostringstream q;
    q << kDialectHeader << "\n";
    StateId state = 0;
    for (const auto& instr : program.instructions()) {
        q << "CREATE (q" << state << ":State";
        if (state == 0) q << ":Init";
        if (std::holds_alternative<Halt>(instr)) q << ":Halt";
        q << " {name: 'q" << state << "'})\n";
        ++state;
    }
    auto edge = [&q](StateId from, const char* type, CounterId c, StateId to) {
        q << "CREATE (q" << from << ")-[:" << type << " {c: '" << counter_name(c) << "'}]->(q" << to << ")\n";
    };
    state = 0;
    for (const auto& instr : program.instructions()) {
        if (const auto* inc = std::get_if<Inc>(&instr)) {
            edge(state, "INC", inc->counter, inc->next);
        } else if (const auto* jz = std::get_if<JzDec>(&instr)) {
            edge(state, "JZDEC_ZERO", jz->counter, jz->if_zero);
            edge(state, "JZDEC_POS", jz->counter, jz->if_pos);
        }
        ++state;
    }
    return {Approach::Qpp, q.str()};
}

inline CypherQuery gen_qpp_query(std::int64_t max_path = kDefaultMaxPath) {
    if (max_path < 0) throw ValidationError("max_path must be non-negative");
    std::ostringstream q;
    q << kDialectHeader << R"(
MATCH REPEATABLE ELEMENTS
  p = (init:Init)
    -[rels:INC|JZDEC_ZERO|JZDEC_POS]->
      {0, )" << max_path << R"(}
    (h:Halt)
WHERE allReduce(
  m = {A: 0, B: 0}, r IN rels |
  CASE
    WHEN r:INC AND r.c = 'A'
      THEN {A: m.A + 1, B: m.B}
    WHEN r:INC AND r.c = 'B'
      THEN {A: m.A, B: m.B + 1}
    WHEN r:JZDEC_POS AND r.c = 'A'
      THEN {A: m.A - 1, B: m.B}
    WHEN r:JZDEC_POS AND r.c = 'B'
      THEN {A: m.A, B: m.B - 1}
    ELSE m
  END,
  CASE
    WHEN r:JZDEC_ZERO AND r.c = 'A'
      THEN m.A = 0
    WHEN r:JZDEC_ZERO AND r.c = 'B'
      THEN m.B = 0
    WHEN r:JZDEC_POS AND r.c = 'A'
      THEN m.A >= 0
    WHEN r:JZDEC_POS AND r.c = 'B'
      THEN m.B >= 0
    ELSE true
  END
)
RETURN rels, length(p) AS steps
NEXT
LET final = reduce(m = {A: 0, B: 0},
  r IN rels |
  CASE
    WHEN r:INC AND r.c = 'A'
      THEN {A: m.A + 1, B: m.B}
    WHEN r:INC AND r.c = 'B'
      THEN {A: m.A, B: m.B + 1}
    WHEN r:JZDEC_POS AND r.c = 'A'
      THEN {A: m.A - 1, B: m.B}
    WHEN r:JZDEC_POS AND r.c = 'B'
      THEN {A: m.A, B: m.B - 1}
    ELSE m
  END
)
RETURN steps, final.A AS ctrA, final.B AS ctrB
)";
    return {Approach::Qpp, q.str()};
}

// Token lexemes with whitespace and comments dropped; two texts that differ
// only in layout produce the same sequence.
inline std::vector<std::string> normalized_tokens(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& tok : cypher::tokenize(text)) {
        if (tok.kind == cypher::TokenKind::End) break;
        out.push_back(tok.kind == cypher::TokenKind::String ? cypher::quote_text(tok.lexeme) : tok.lexeme);
    }
    return out;
}

struct LintViolation {
    std::string token;
    cypher::Position pos;
    std::string reason;
};

// Checks a Reduce-approach query against the primitive whitelist: reduce,
// CASE, arithmetic, map/list literals, indexing, head, range, LET, RETURN.
inline std::vector<LintViolation> lint_primitives(const CypherQuery& query) {
    using cypher::TokenKind;
    static const std::set<std::string> kAllowedKeywords = {"CYPHER", "LET",  "RETURN", "AS",  "CASE", "WHEN",
                                                           "THEN",   "ELSE", "END",    "IN",  "AND",  "OR",
                                                           "NOT",    "TRUE", "FALSE",  "NULL"};
    static const std::set<std::string> kAllowedFunctions = {"REDUCE", "HEAD", "RANGE"};
    static const std::set<std::string> kGraphPunct = {"->", "<-", ":"};

    std::vector<LintViolation> violations;
    const auto tokens = cypher::tokenize(query.text);
    int map_depth = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& tok = tokens[i];
        const auto upper = cypher::to_upper(tok.lexeme);
        const bool call = i + 1 < tokens.size() && tokens[i + 1].is_punct("(");
        const bool after_dot = i > 0 && tokens[i - 1].is_punct(".");
        if (tok.is_punct("{")) ++map_depth;
        if (tok.is_punct("}")) --map_depth;

        if (tok.kind == TokenKind::Keyword && !after_dot && !kAllowedKeywords.count(upper)) {
            // Keywords used as map keys or property names are plain names.
            const bool map_key = map_depth > 0 && i + 1 < tokens.size() && tokens[i + 1].is_punct(":");
            if (!map_key) violations.push_back({tok.lexeme, tok.pos, "clause or keyword outside the primitive set"});
        } else if (tok.kind == TokenKind::Identifier && !after_dot && (upper == "APOC" || upper == "GDS")) {
            violations.push_back({tok.lexeme, tok.pos, "procedure library namespace"});
        } else if (tok.kind == TokenKind::Identifier && call && !after_dot && !kAllowedFunctions.count(upper)) {
            violations.push_back({tok.lexeme, tok.pos, "function outside the primitive set"});
        } else if (tok.kind == TokenKind::Parameter) {
            violations.push_back({"$" + tok.lexeme, tok.pos, "query parameter"});
        } else if (tok.kind == TokenKind::Punct && kGraphPunct.count(tok.lexeme) && !(tok.lexeme == ":" && map_depth > 0)) {
            violations.push_back({tok.lexeme, tok.pos, "graph pattern or label syntax"});
        }
    }
    return violations;
}

}  // namespace cm2cy
