#pragma once

// Two-counter machine model: program representation, the reference
// step/run interpreter and the guarded walk over the state graph that the
// QPP traversal query explores.
//
// Step-count conventions differ on purpose between the two runners:
//   run()      counts executed instructions, the final HALT included;
//   qpp_walk() counts traversed edges and HALT owns no edge.
// For every program that halts within fuel:
//   qpp_walk(p).steps == run(p).machine_steps - 1.

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cm2cypher/errors.hpp"

namespace cm2cy {

using StateId = std::int64_t;
using Counter = std::int64_t;

inline constexpr StateId kHaltedState = -1;
inline constexpr std::int64_t kDefaultFuel = 1'000'000;
inline constexpr std::size_t kDefaultTraceCap = 10'000;

enum class CounterId { A, B };

inline char counter_name(CounterId c) { return c == CounterId::A ? 'A' : 'B'; }

struct Inc {
    CounterId counter;
    StateId next;
    bool operator==(const Inc&) const = default;
};

struct JzDec {
    CounterId counter;
    StateId if_zero;
    StateId if_pos;
    bool operator==(const JzDec&) const = default;
};

struct Halt {
    bool operator==(const Halt&) const = default;
};

using Instruction = std::variant<Inc, JzDec, Halt>;

// Dense, state-indexed instruction list. Construction validates: the list
// is non-empty and every referenced state lies in [0, size).
class Program {
public:
    explicit Program(std::vector<Instruction> instructions)
        : instructions_(std::move(instructions)) {
        validate();
    }

    std::span<const Instruction> instructions() const noexcept { return instructions_; }
    std::size_t size() const noexcept { return instructions_.size(); }
    const Instruction& at(StateId state) const { return instructions_.at(static_cast<std::size_t>(state)); }

    bool contains_halt() const {
        for (const auto& instr : instructions_) {
            if (std::holds_alternative<Halt>(instr)) return true;
        }
        return false;
    }

    bool operator==(const Program&) const = default;

private:
    void validate() const {
        if (instructions_.empty()) throw ValidationError("program is empty");
        const auto n = static_cast<StateId>(instructions_.size());
        auto check = [n](StateId from, StateId target) {
            if (target < 0 || target >= n) {
                throw ValidationError("state " + std::to_string(from) + " references state " +
                                      std::to_string(target) + " outside [0, " +
                                      std::to_string(n) + ")");
            }
        };
        for (StateId s = 0; s < n; ++s) {
            const auto& instr = instructions_[static_cast<std::size_t>(s)];
            if (const auto* inc = std::get_if<Inc>(&instr)) {
                check(s, inc->next);
            } else if (const auto* jz = std::get_if<JzDec>(&instr)) {
                check(s, jz->if_zero);
                check(s, jz->if_pos);
            }
        }
    }

    std::vector<Instruction> instructions_;
};

struct Config {
    StateId state = 0;
    Counter a = 0;
    Counter b = 0;

    bool halted() const noexcept { return state == kHaltedState; }
    Counter counter(CounterId c) const noexcept { return c == CounterId::A ? a : b; }
    Counter& counter(CounterId c) noexcept { return c == CounterId::A ? a : b; }

    bool operator==(const Config&) const = default;
};

struct TraceRow {
    std::int64_t step = 0;
    StateId state_before = 0;
    std::string instruction_tag;
    Config config_after;

    bool operator==(const TraceRow&) const = default;
};

struct RunResult {
    Config final;
    std::int64_t machine_steps = 0;
    bool halted = false;
    std::vector<TraceRow> trace;
    bool trace_truncated = false;
};

struct PathResult {
    std::vector<std::string> edge_tags;
    std::int64_t steps = 0;
    Counter final_a = 0;
    Counter final_b = 0;
};

namespace detail {

inline Counter checked_increment(Counter value, StateId state) {
    if (value == std::numeric_limits<Counter>::max()) {
        throw OverflowError("counter overflow at state " + std::to_string(state));
    }
    return value + 1;
}

inline void check_state(const Program& program, StateId state) {
    if (state < 0 || state >= static_cast<StateId>(program.size())) {
        throw ValidationError("config state " + std::to_string(state) + " is not valid for program");
    }
}

}  // namespace detail

// Label used in traces: "INC(A)", "JZDEC(B), B=0", "JZDEC(B), B>0", "HALT".
inline std::string instruction_tag(const Instruction& instr, const Config& before) {
    if (const auto* inc = std::get_if<Inc>(&instr)) {
        return std::string("INC(") + counter_name(inc->counter) + ")";
    }
    if (const auto* jz = std::get_if<JzDec>(&instr)) {
        const char c = counter_name(jz->counter);
        const bool zero = before.counter(jz->counter) == 0;
        return std::string("JZDEC(") + c + "), " + c + (zero ? "=0" : ">0");
    }
    return "HALT";
}

inline Config step(const Program& program, const Config& config) {
    if (config.halted()) return config;
    detail::check_state(program, config.state);

    Config next = config;
    const auto& instr = program.at(config.state);
    if (const auto* inc = std::get_if<Inc>(&instr)) {
        next.counter(inc->counter) = detail::checked_increment(config.counter(inc->counter), config.state);
        next.state = inc->next;
    } else if (const auto* jz = std::get_if<JzDec>(&instr)) {
        Counter& c = next.counter(jz->counter);
        if (c == 0) {
            next.state = jz->if_zero;
        } else {
            --c;
            next.state = jz->if_pos;
        }
    } else {
        next.state = kHaltedState;
    }
    return next;
}

// Runs from (0, 0, 0) for at most `fuel` steps. Absorption steps after HALT
// are neither counted nor traced.
inline RunResult run(const Program& program, std::int64_t fuel = kDefaultFuel, bool capture_trace = false,
                     std::size_t trace_cap = kDefaultTraceCap) {
    if (fuel < 0) throw ValidationError("fuel must be non-negative");

    RunResult result;
    Config config;
    while (result.machine_steps < fuel && !config.halted()) {
        Config after = step(program, config);
        if (capture_trace) {
            if (result.trace.size() < trace_cap) {
                result.trace.push_back(TraceRow{result.machine_steps, config.state,
                                                instruction_tag(program.at(config.state), config), after});
            } else {
                result.trace_truncated = true;
            }
        }
        config = after;
        ++result.machine_steps;
    }
    result.final = config;
    result.halted = config.halted();
    return result;
}

// Deterministic guarded walk over the program's state graph. Nodes are
// states; INC contributes one edge, JZDEC contributes a JZDEC_ZERO and a
// JZDEC_POS edge, HALT none. At each node exactly one outgoing edge passes
// the allReduce predicate:
//   JZDEC_ZERO  counter == 0 (accumulator unchanged by the update)
//   JZDEC_POS   counter - 1 >= 0 after the update
//   INC         always
// The walk stops on a Halt node; counters are then re-folded from the edge
// list, mirroring the NEXT-stage reduce of the generated query.
inline PathResult qpp_walk(const Program& program, std::int64_t fuel = kDefaultFuel) {
    if (fuel < 0) throw ValidationError("fuel must be non-negative");

    struct Edge {
        enum Kind { IncEdge, ZeroEdge, PosEdge } kind;
        CounterId counter;
    };

    std::vector<Edge> edges;
    StateId node = 0;
    Counter a = 0;
    Counter b = 0;
    while (!std::holds_alternative<Halt>(program.at(node))) {
        if (static_cast<std::int64_t>(edges.size()) >= fuel) {
            throw NoPathError("no path to a Halt state within " + std::to_string(fuel) + " edges");
        }
        const auto& instr = program.at(node);
        if (const auto* inc = std::get_if<Inc>(&instr)) {
            Counter& c = inc->counter == CounterId::A ? a : b;
            c = detail::checked_increment(c, node);
            edges.push_back({Edge::IncEdge, inc->counter});
            node = inc->next;
            continue;
        }
        const auto& jz = std::get<JzDec>(instr);
        Counter& c = jz.counter == CounterId::A ? a : b;
        const bool zero_passes = c == 0;
        const bool pos_passes = c - 1 >= 0;
        assert(zero_passes != pos_passes && "JZDEC edge predicates must be mutually exclusive");
        if (zero_passes == pos_passes) throw Error("ambiguous edge selection in qpp_walk");
        if (zero_passes) {
            edges.push_back({Edge::ZeroEdge, jz.counter});
            node = jz.if_zero;
        } else {
            --c;
            edges.push_back({Edge::PosEdge, jz.counter});
            node = jz.if_pos;
        }
    }

    PathResult result;
    result.steps = static_cast<std::int64_t>(edges.size());
    result.edge_tags.reserve(edges.size());
    for (const auto& e : edges) {
        const char* kind = e.kind == Edge::IncEdge ? "INC" : e.kind == Edge::ZeroEdge ? "JZDEC_ZERO" : "JZDEC_POS";
        result.edge_tags.push_back(std::string(kind) + "(" + counter_name(e.counter) + ")");
        Counter& c = e.counter == CounterId::A ? result.final_a : result.final_b;
        if (e.kind == Edge::IncEdge) ++c;
        if (e.kind == Edge::PosEdge) --c;
    }
    return result;
}

}  // namespace cm2cy
