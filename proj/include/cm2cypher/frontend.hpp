#pragma once

// Counter-machine DSL, the list-of-maps JSON document, the trace table and
// the seeded random program generator.
//
// DSL, one instruction per line:
//   state <n>: INC <A|B> -> <n>
//   state <n>: JZDEC <A|B> ? <n_zero> : <n_pos>
//   state <n>: HALT
// '#' starts a comment; blank lines are ignored. States may appear in any
// order but must cover 0..n-1 exactly.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cm2cypher/errors.hpp"
#include "cm2cypher/machine.hpp"

namespace cm2cy {

using ProgramDocument = nlohmann::ordered_json;

// The four-state example machine: q0 INC(A)->q1, q1 JZDEC(B) ? q2 : q3,
// q2 INC(B)->q0, q3 HALT.
inline Program example_program() {
    return Program({Inc{CounterId::A, 1}, JzDec{CounterId::B, 2, 3}, Inc{CounterId::B, 0}, Halt{}});
}

namespace detail {

class DslLine {
public:
    DslLine(std::string_view text, std::size_t line) : text_(text), line_(line) {}

    void skip_space() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
    }

    bool at_end() {
        skip_space();
        return pos_ >= text_.size();
    }

    std::size_t column() const { return pos_ + 1; }

    [[noreturn]] void fail(const std::string& message, std::optional<std::size_t> column = {}) const {
        throw ParseError(line_, column.value_or(pos_ + 1), message);
    }

    std::string word() {
        skip_space();
        const auto start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
        if (start == pos_) fail("expected a word");
        return std::string(text_.substr(start, pos_ - start));
    }

    void keyword(std::string_view kw) {
        skip_space();
        const auto col = column();
        if (word() != kw) fail("expected '" + std::string(kw) + "'", col);
    }

    void punct(std::string_view p) {
        skip_space();
        if (text_.substr(pos_, p.size()) != p) fail("expected '" + std::string(p) + "'");
        pos_ += p.size();
    }

    std::pair<StateId, std::size_t> number() {
        skip_space();
        const auto col = column();
        const auto start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("expected a state number");
        if (pos_ - start > 9) fail("state number too large", col);
        return {std::stoll(std::string(text_.substr(start, pos_ - start))), col};
    }

    CounterId counter() {
        skip_space();
        const auto col = column();
        const auto name = word();
        if (name == "A") return CounterId::A;
        if (name == "B") return CounterId::B;
        fail("unknown counter '" + name + "' (expected A or B)", col);
    }

private:
    std::string_view text_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

struct Reference {
    StateId target;
    std::size_t line;
    std::size_t column;
};

}  // namespace detail

inline Program parse_dsl(std::string_view text) {
    std::map<StateId, std::pair<Instruction, std::size_t>> by_state;
    std::vector<detail::Reference> references;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto raw = text.substr(start, end - start);
        ++line_no;
        start = end + 1;

        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        detail::DslLine line(raw, line_no);
        if (line.at_end()) continue;

        line.keyword("state");
        const auto [state, state_col] = line.number();
        line.punct(":");
        const auto op_col = (line.skip_space(), line.column());
        const auto op = line.word();

        Instruction instr = Halt{};
        if (op == "INC") {
            const auto c = line.counter();
            line.punct("->");
            const auto [next, col] = line.number();
            references.push_back({next, line_no, col});
            instr = Inc{c, next};
        } else if (op == "JZDEC") {
            const auto c = line.counter();
            line.punct("?");
            const auto [zero, zero_col] = line.number();
            line.punct(":");
            const auto [pos, pos_col] = line.number();
            references.push_back({zero, line_no, zero_col});
            references.push_back({pos, line_no, pos_col});
            instr = JzDec{c, zero, pos};
        } else if (op != "HALT") {
            line.fail("unknown instruction '" + op + "'", op_col);
        }
        if (!line.at_end()) line.fail("unexpected trailing text");

        if (by_state.count(state)) {
            throw ParseError(line_no, state_col,
                             "duplicate state " + std::to_string(state) + " (first defined on line " +
                                 std::to_string(by_state.at(state).second) + ")");
        }
        by_state.emplace(state, std::make_pair(instr, line_no));
    }

    if (by_state.empty()) throw ParseError(line_no, 1, "program contains no states");
    const auto n = static_cast<StateId>(by_state.size());
    StateId expected = 0;
    for (const auto& [state, entry] : by_state) {
        if (state != expected) {
            throw ParseError(entry.second, 1, "missing state " + std::to_string(expected) +
                                                  " (states must be numbered densely from 0)");
        }
        ++expected;
    }
    for (const auto& ref : references) {
        if (ref.target >= n) {
            throw ParseError(ref.line, ref.column, "reference to undefined state " + std::to_string(ref.target));
        }
    }

    std::vector<Instruction> instructions;
    instructions.reserve(by_state.size());
    for (auto& [state, entry] : by_state) instructions.push_back(entry.first);
    return Program(std::move(instructions));
}

inline std::string render_dsl(const Program& program) {
    std::ostringstream out;
    StateId state = 0;
    for (const auto& instr : program.instructions()) {
        out << "state " << state++ << ": ";
        if (const auto* inc = std::get_if<Inc>(&instr)) {
            out << "INC " << counter_name(inc->counter) << " -> " << inc->next;
        } else if (const auto* jz = std::get_if<JzDec>(&instr)) {
            out << "JZDEC " << counter_name(jz->counter) << " ? " << jz->if_zero << " : " << jz->if_pos;
        } else {
            out << "HALT";
        }
        out << '\n';
    }
    return out.str();
}

// HALT entries carry counter "" and next = own state.
inline ProgramDocument to_program_document(const Program& program) {
    ProgramDocument doc = ProgramDocument::array();
    StateId state = 0;
    for (const auto& instr : program.instructions()) {
        ProgramDocument entry = ProgramDocument::object();
        entry["state"] = state;
        if (const auto* inc = std::get_if<Inc>(&instr)) {
            entry["op"] = "INC";
            entry["counter"] = std::string(1, counter_name(inc->counter));
            entry["next"] = inc->next;
        } else if (const auto* jz = std::get_if<JzDec>(&instr)) {
            entry["op"] = "JZDEC";
            entry["counter"] = std::string(1, counter_name(jz->counter));
            entry["q_zero"] = jz->if_zero;
            entry["q_pos"] = jz->if_pos;
        } else {
            entry["op"] = "HALT";
            entry["counter"] = "";
            entry["next"] = state;
        }
        doc.push_back(std::move(entry));
        ++state;
    }
    return doc;
}

template <typename Json>
Program from_program_document(const Json& doc) {
    if (!doc.is_array()) throw SchemaError("program document must be a list");
    if (doc.empty()) throw SchemaError("program document is empty");

    auto fail = [](std::size_t i, const std::string& what) -> SchemaError {
        return SchemaError("entry " + std::to_string(i) + ": " + what);
    };
    auto integer = [&](const Json& entry, std::size_t i, const char* key) -> StateId {
        if (!entry.contains(key)) throw fail(i, std::string("missing key '") + key + "'");
        const auto& v = entry.at(key);
        if (!v.is_number_integer()) throw fail(i, std::string("'") + key + "' must be an integer");
        return v.template get<StateId>();
    };
    auto text = [&](const Json& entry, std::size_t i, const char* key) -> std::string {
        if (!entry.contains(key)) throw fail(i, std::string("missing key '") + key + "'");
        const auto& v = entry.at(key);
        if (!v.is_string()) throw fail(i, std::string("'") + key + "' must be a string");
        return v.template get<std::string>();
    };
    auto only_keys = [&](const Json& entry, std::size_t i, std::initializer_list<std::string_view> keys) {
        for (auto it = entry.begin(); it != entry.end(); ++it) {
            if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
                throw fail(i, "unexpected key '" + it.key() + "'");
            }
        }
    };
    auto counter = [&](const std::string& name, std::size_t i) {
        if (name == "A") return CounterId::A;
        if (name == "B") return CounterId::B;
        throw fail(i, "counter must be 'A' or 'B', got '" + name + "'");
    };

    std::vector<Instruction> instructions;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& entry = doc[i];
        if (!entry.is_object()) throw fail(i, "entry must be a map");
        const auto state = integer(entry, i, "state");
        if (state != static_cast<StateId>(i)) {
            throw fail(i, "state " + std::to_string(state) + " does not match list position");
        }
        const auto op = text(entry, i, "op");
        const auto ctr = text(entry, i, "counter");
        if (op == "INC") {
            only_keys(entry, i, {"state", "op", "counter", "next"});
            instructions.push_back(Inc{counter(ctr, i), integer(entry, i, "next")});
        } else if (op == "JZDEC") {
            only_keys(entry, i, {"state", "op", "counter", "q_zero", "q_pos"});
            instructions.push_back(JzDec{counter(ctr, i), integer(entry, i, "q_zero"), integer(entry, i, "q_pos")});
        } else if (op == "HALT") {
            only_keys(entry, i, {"state", "op", "counter", "next"});
            if (!ctr.empty()) throw fail(i, "HALT must carry counter ''");
            if (integer(entry, i, "next") != state) throw fail(i, "HALT must carry next equal to its own state");
            instructions.push_back(Halt{});
        } else {
            throw fail(i, "unknown op '" + op + "'");
        }
    }
    try {
        return Program(std::move(instructions));
    } catch (const ValidationError& e) {
        throw SchemaError(e.what());
    }
}

namespace detail {

inline std::size_t display_width(std::string_view s) {
    std::size_t width = 0;
    for (unsigned char c : s) {
        if ((c & 0xC0) != 0x80) ++width;
    }
    return width;
}

}  // namespace detail

// One row per executed instruction. The counter changed by a row is shown
// as "before→after" ("->" in ASCII mode).
inline std::string format_trace(const RunResult& result, bool ascii = false) {
    const std::string arrow = ascii ? "->" : "\xE2\x86\x92";
    std::vector<std::vector<std::string>> rows{{"Step", "Instr", "St", "A", "B"}};

    Config before;
    for (const auto& row : result.trace) {
        auto cell = [&](Counter from, Counter to) {
            return from == to ? std::to_string(to) : std::to_string(from) + arrow + std::to_string(to);
        };
        rows.push_back({std::to_string(row.step), row.instruction_tag, "q" + std::to_string(row.state_before),
                        cell(before.a, row.config_after.a), cell(before.b, row.config_after.b)});
        before = row.config_after;
    }

    std::vector<std::size_t> widths(5, 0);
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) widths[c] = std::max(widths[c], detail::display_width(r[c]));
    }

    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& r) {
        std::string line;
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (c) line += " | ";
            line += r[c];
            if (c + 1 < r.size()) line.append(widths[c] - detail::display_width(r[c]), ' ');
        }
        out << line << '\n';
    };
    emit(rows.front());
    std::string rule;
    for (std::size_t c = 0; c < widths.size(); ++c) {
        if (c) rule += "-+-";
        rule.append(widths[c], '-');
    }
    out << rule << '\n';
    for (std::size_t i = 1; i < rows.size(); ++i) emit(rows[i]);

    if (result.trace_truncated) {
        out << "... trace truncated after " << result.trace.size() << " rows (" << result.machine_steps
            << " steps executed)\n";
    }
    return out.str();
}

// Deterministic in `seed`; always contains at least one HALT. Uses raw
// mt19937_64 output so the corpus is identical across standard libraries.
inline Program random_program(std::uint64_t seed, std::size_t max_states) {
    if (max_states < 1) throw ValidationError("max_states must be at least 1");
    std::mt19937_64 rng(seed);
    auto below = [&rng](std::uint64_t n) { return static_cast<StateId>(rng() % n); };

    const auto n = static_cast<std::uint64_t>(1 + below(max_states));
    const auto forced_halt = below(n);
    std::vector<Instruction> instructions;
    instructions.reserve(n);
    for (StateId s = 0; s < static_cast<StateId>(n); ++s) {
        const auto kind = below(10);
        const auto counter = below(2) == 0 ? CounterId::A : CounterId::B;
        if (s == forced_halt || kind == 9) {
            instructions.push_back(Halt{});
        } else if (kind < 4) {
            instructions.push_back(Inc{counter, below(n)});
        } else {
            const auto zero = below(n);
            instructions.push_back(JzDec{counter, zero, below(n)});
        }
    }
    return Program(std::move(instructions));
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// `.json` files are program documents; anything else is DSL text.
inline Program load_program_file(const std::string& path) {
    const auto text = read_text_file(path);
    if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw SchemaError(std::string("invalid JSON: ") + e.what());
        }
        return from_program_document(doc);
    }
    return parse_dsl(text);
}

}  // namespace cm2cy
