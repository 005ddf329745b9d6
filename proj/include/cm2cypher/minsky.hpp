#pragma once

// Turing machine -> two-stack machine -> three-counter machine -> two-counter
// Program, with an interpreter per stage so each compilation step can be
// checked against the one before it.
//
// Tape. The TM tape is two-way infinite and blank outside the written cells;
// moving left of the leftmost cell ever visited reads a fresh blank. The
// decoded observable of every stage is the tape with leading and trailing
// blanks removed.
//
// Two-stack machine. Left stack = cells left of the head (top is nearest),
// right stack = the head cell and everything to its right (top is the head).
// An empty right stack reads as blank, as does an empty left stack when the
// head moves left. Stacks start empty; the TM input is loaded by a prelude of
// Push instructions. Step bound:
//     tsm_steps <= |input| + 4 * tm_steps
//
// Three-counter machine. Counter 0 holds the left stack, counter 1 the right
// stack, counter 2 is scratch. A stack is a base-b numeral, b = |alphabet| + 1,
// with symbol i stored as digit i + 1 and the top in the least significant
// digit, so an empty stack is exactly the value 0. With X the stack counter
// value before the operation:
//     push costs (3b + 1) * X + d + 2 steps   (d <= b - 1 the pushed digit)
//     pop  costs X + 3 * (X / b) + 2 steps
// so each two-stack step costs at most (3b + 1) * Xmax + b + 1 counter steps,
// Xmax = b^h - 1 for maximum stack height h.
//
// Two-counter Program. The counter vector (c0, c1, c2, c3) is stored as
// A = 2^c0 * 3^c1 * 5^c2 * 7^c3 and B is scratch. Machines start at A = 0, so
// state 0 is a bootstrap INC(A) establishing the empty product A = 1. With A
// the value before the operation and p the counter's prime:
//     inc   costs (3p + 1) * A + 2 steps
//     jzdec costs at most 3 * A + p + 2 steps
// so each counter-machine step costs at most 22 * Amax + 9 two-counter steps.
// Every gadget leaves B = 0 on exit.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cm2cypher/errors.hpp"
#include "cm2cypher/machine.hpp"

namespace cm2cy::minsky {

using Symbol = std::size_t;
using Tape = std::vector<Symbol>;

// ---------------------------------------------------------------------------
// Turing machine

enum class Move { Left, Right };

struct TmTransition {
    std::size_t next;
    Symbol write;
    Move move;
};

struct TuringMachine {
    std::vector<std::string> states;
    std::vector<std::string> alphabet;
    Symbol blank = 0;
    std::map<std::pair<std::size_t, Symbol>, TmTransition> transitions;
    std::size_t initial = 0;
    std::set<std::size_t> halting;
    Tape input;

    bool is_halting(std::size_t state) const { return halting.count(state) > 0; }
};

inline void validate(const TuringMachine& tm) {
    if (tm.states.empty()) throw ValidationError("TM has no states");
    if (tm.alphabet.empty()) throw ValidationError("TM alphabet is empty");
    if (tm.blank >= tm.alphabet.size()) throw ValidationError("TM blank is not in the alphabet");
    if (tm.initial >= tm.states.size()) throw ValidationError("TM initial state is unknown");
    for (auto s : tm.input) {
        if (s >= tm.alphabet.size()) throw ValidationError("TM input symbol outside the alphabet");
    }
    for (std::size_t q = 0; q < tm.states.size(); ++q) {
        if (tm.is_halting(q)) continue;
        for (Symbol s = 0; s < tm.alphabet.size(); ++s) {
            auto it = tm.transitions.find({q, s});
            if (it == tm.transitions.end()) {
                throw ValidationError("TM has no transition for state '" + tm.states[q] + "' reading '" +
                                      tm.alphabet[s] + "'");
            }
            if (it->second.next >= tm.states.size() || it->second.write >= tm.alphabet.size()) {
                throw ValidationError("TM transition for state '" + tm.states[q] + "' is out of range");
            }
        }
    }
}

// Fixture format: {states, alphabet, blank, transitions: [[q, read, q', write, "L"|"R"], ...],
// initial, halting, input}.
inline TuringMachine tm_from_json(const nlohmann::json& doc) {
    auto need = [&](const char* key) -> const nlohmann::json& {
        if (!doc.contains(key)) throw SchemaError(std::string("TM fixture is missing '") + key + "'");
        return doc.at(key);
    };
    auto strings = [&](const char* key) {
        const auto& v = need(key);
        if (!v.is_array()) throw SchemaError(std::string("'") + key + "' must be a list");
        std::vector<std::string> out;
        for (const auto& e : v) {
            if (!e.is_string()) throw SchemaError(std::string("'") + key + "' entries must be strings");
            out.push_back(e.get<std::string>());
        }
        return out;
    };
    auto index_of = [](const std::vector<std::string>& names, const std::string& name, const char* what) {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw SchemaError(std::string("unknown ") + what + " '" + name + "'");
        return static_cast<std::size_t>(it - names.begin());
    };

    if (!doc.is_object()) throw SchemaError("TM fixture must be a JSON object");
    TuringMachine tm;
    tm.states = strings("states");
    tm.alphabet = strings("alphabet");
    if (!need("blank").is_string()) throw SchemaError("'blank' must be a string");
    tm.blank = index_of(tm.alphabet, need("blank").get<std::string>(), "blank symbol");
    if (!need("initial").is_string()) throw SchemaError("'initial' must be a string");
    tm.initial = index_of(tm.states, need("initial").get<std::string>(), "initial state");
    for (const auto& h : strings("halting")) tm.halting.insert(index_of(tm.states, h, "halting state"));
    for (const auto& s : strings("input")) tm.input.push_back(index_of(tm.alphabet, s, "input symbol"));

    const auto& transitions = need("transitions");
    if (!transitions.is_array()) throw SchemaError("'transitions' must be a list");
    for (const auto& t : transitions) {
        if (!t.is_array() || t.size() != 5 || !std::all_of(t.begin(), t.end(), [](const auto& e) { return e.is_string(); })) {
            throw SchemaError("each transition must be [state, read, next, write, move]");
        }
        const auto q = index_of(tm.states, t[0].get<std::string>(), "state");
        const auto read = index_of(tm.alphabet, t[1].get<std::string>(), "symbol");
        const auto next = index_of(tm.states, t[2].get<std::string>(), "state");
        const auto write = index_of(tm.alphabet, t[3].get<std::string>(), "symbol");
        const auto move = t[4].get<std::string>();
        if (move != "L" && move != "R") throw SchemaError("move must be \"L\" or \"R\"");
        if (!tm.transitions.emplace(std::make_pair(q, read), TmTransition{next, write, move == "L" ? Move::Left : Move::Right}).second) {
            throw SchemaError("duplicate transition for state '" + t[0].get<std::string>() + "' reading '" +
                              t[1].get<std::string>() + "'");
        }
    }
    validate(tm);
    return tm;
}

inline Tape trim_blanks(Tape tape, Symbol blank) {
    auto first = std::find_if(tape.begin(), tape.end(), [&](Symbol s) { return s != blank; });
    tape.erase(tape.begin(), first);
    while (!tape.empty() && tape.back() == blank) tape.pop_back();
    return tape;
}

inline std::string render_tape(const Tape& tape, const std::vector<std::string>& alphabet) {
    std::string out;
    for (auto s : tape) out += alphabet.at(s);
    return out;
}

struct TmResult {
    bool halted = false;
    std::int64_t steps = 0;
    Tape tape;  // blanks trimmed
};

inline TmResult tm_run(const TuringMachine& tm, std::int64_t fuel) {
    Tape tape = tm.input;
    if (tape.empty()) tape.push_back(tm.blank);
    std::size_t head = 0;
    std::size_t state = tm.initial;
    TmResult result;
    while (!tm.is_halting(state) && result.steps < fuel) {
        const auto& t = tm.transitions.at({state, tape[head]});
        tape[head] = t.write;
        if (t.move == Move::Right) {
            if (++head == tape.size()) tape.push_back(tm.blank);
        } else if (head == 0) {
            tape.insert(tape.begin(), tm.blank);
        } else {
            --head;
        }
        state = t.next;
        ++result.steps;
    }
    result.halted = tm.is_halting(state);
    result.tape = trim_blanks(std::move(tape), tm.blank);
    return result;
}

// ---------------------------------------------------------------------------
// Two-stack machine

enum class StackId { Left, Right };

struct Push {
    StackId stack;
    Symbol symbol;
    std::size_t next;
};

// Pops the top and branches on it; on_symbol[s] is the successor after
// popping symbol s.
struct Pop {
    StackId stack;
    std::size_t on_empty;
    std::vector<std::size_t> on_symbol;
};

struct StackHalt {};

using StackInstruction = std::variant<Push, Pop, StackHalt>;

// Starts in state 0 with both stacks empty.
struct TwoStackMachine {
    std::size_t alphabet_size = 0;
    Symbol blank = 0;
    std::vector<StackInstruction> program;
};

inline void validate(const TwoStackMachine& tsm) {
    const auto n = tsm.program.size();
    if (n == 0) throw ValidationError("two-stack machine is empty");
    for (const auto& instr : tsm.program) {
        if (const auto* push = std::get_if<Push>(&instr)) {
            if (push->symbol >= tsm.alphabet_size || push->next >= n) throw ValidationError("invalid Push");
        } else if (const auto* pop = std::get_if<Pop>(&instr)) {
            if (pop->on_empty >= n || pop->on_symbol.size() != tsm.alphabet_size) throw ValidationError("invalid Pop");
            for (auto t : pop->on_symbol) {
                if (t >= n) throw ValidationError("invalid Pop target");
            }
        }
    }
}

struct TsmResult {
    bool halted = false;
    std::int64_t steps = 0;
    std::vector<Symbol> left;   // bottom to top
    std::vector<Symbol> right;  // bottom to top
    std::size_t max_height = 0;
};

inline TsmResult tsm_run(const TwoStackMachine& tsm, std::int64_t fuel) {
    TsmResult result;
    std::size_t state = 0;
    for (;;) {
        const auto& instr = tsm.program.at(state);
        if (std::holds_alternative<StackHalt>(instr)) {
            result.halted = true;
            break;
        }
        if (result.steps >= fuel) break;
        if (const auto* push = std::get_if<Push>(&instr)) {
            auto& stack = push->stack == StackId::Left ? result.left : result.right;
            stack.push_back(push->symbol);
            result.max_height = std::max(result.max_height, stack.size());
            state = push->next;
        } else {
            const auto& pop = std::get<Pop>(instr);
            auto& stack = pop.stack == StackId::Left ? result.left : result.right;
            if (stack.empty()) {
                state = pop.on_empty;
            } else {
                state = pop.on_symbol.at(stack.back());
                stack.pop_back();
            }
        }
        ++result.steps;
    }
    return result;
}

inline Tape stacks_to_tape(const std::vector<Symbol>& left, const std::vector<Symbol>& right, Symbol blank) {
    Tape tape(left.begin(), left.end());
    tape.insert(tape.end(), right.rbegin(), right.rend());
    return trim_blanks(std::move(tape), blank);
}

inline TwoStackMachine tm_to_two_stack(const TuringMachine& tm) {
    validate(tm);
    TwoStackMachine tsm;
    tsm.alphabet_size = tm.alphabet.size();
    tsm.blank = tm.blank;

    auto reserve = [&tsm] {
        tsm.program.emplace_back(StackHalt{});
        return tsm.program.size() - 1;
    };

    // Prelude pushes the input so its first symbol ends on top of the right stack.
    std::vector<std::size_t> prelude;
    for (std::size_t i = 0; i < tm.input.size(); ++i) prelude.push_back(reserve());
    std::vector<std::size_t> entry(tm.states.size());
    for (auto& e : entry) e = reserve();
    for (std::size_t i = 0; i < prelude.size(); ++i) {
        const auto symbol = tm.input[tm.input.size() - 1 - i];
        const auto next = i + 1 < prelude.size() ? prelude[i + 1] : entry[tm.initial];
        tsm.program[prelude[i]] = Push{StackId::Right, symbol, next};
    }

    // Push <symbol> onto the right stack, then continue in TM state q.
    std::map<std::pair<Symbol, std::size_t>, std::size_t> push_right_then;
    auto push_right = [&](Symbol s, std::size_t q) {
        auto [it, inserted] = push_right_then.emplace(std::make_pair(s, q), 0);
        if (inserted) {
            it->second = reserve();
            tsm.program[it->second] = Push{StackId::Right, s, entry[q]};
        }
        return it->second;
    };

    for (std::size_t q = 0; q < tm.states.size(); ++q) {
        if (tm.is_halting(q)) continue;  // entry stays StackHalt
        std::vector<std::size_t> handlers(tm.alphabet.size());
        for (Symbol s = 0; s < tm.alphabet.size(); ++s) {
            const auto& t = tm.transitions.at({q, s});
            const auto h = reserve();
            if (t.move == Move::Right) {
                tsm.program[h] = Push{StackId::Left, t.write, entry[t.next]};
            } else {
                const auto pull = reserve();
                Pop pop{StackId::Left, push_right(tm.blank, t.next), {}};
                for (Symbol u = 0; u < tm.alphabet.size(); ++u) pop.on_symbol.push_back(push_right(u, t.next));
                tsm.program[pull] = pop;
                tsm.program[h] = Push{StackId::Right, t.write, pull};
            }
            handlers[s] = h;
        }
        tsm.program[entry[q]] = Pop{StackId::Right, handlers[tm.blank], handlers};
    }
    validate(tsm);
    return tsm;
}

inline std::int64_t tsm_step_bound(std::int64_t tm_steps, std::size_t input_length) {
    return static_cast<std::int64_t>(input_length) + 4 * tm_steps;
}

// ---------------------------------------------------------------------------
// Multi-counter machine

struct CounterInc {
    std::size_t counter;
    std::size_t next;
};

struct CounterJzDec {
    std::size_t counter;
    std::size_t if_zero;
    std::size_t if_pos;
};

struct CounterHalt {};

using CounterInstruction = std::variant<CounterInc, CounterJzDec, CounterHalt>;

// Starts in state 0 with all counters zero.
struct MultiCounterMachine {
    std::size_t counters = 0;
    std::vector<CounterInstruction> program;
};

inline void validate(const MultiCounterMachine& mcm) {
    const auto n = mcm.program.size();
    if (n == 0) throw ValidationError("counter machine is empty");
    for (const auto& instr : mcm.program) {
        if (const auto* inc = std::get_if<CounterInc>(&instr)) {
            if (inc->counter >= mcm.counters || inc->next >= n) throw ValidationError("invalid counter Inc");
        } else if (const auto* jz = std::get_if<CounterJzDec>(&instr)) {
            if (jz->counter >= mcm.counters || jz->if_zero >= n || jz->if_pos >= n) {
                throw ValidationError("invalid counter JzDec");
            }
        }
    }
}

struct McmResult {
    bool halted = false;
    std::int64_t steps = 0;
    std::vector<Counter> counters;
    Counter max_value = 0;
};

inline McmResult mcm_run(const MultiCounterMachine& mcm, std::int64_t fuel) {
    McmResult result;
    result.counters.assign(mcm.counters, 0);
    std::size_t state = 0;
    for (;;) {
        const auto& instr = mcm.program.at(state);
        if (std::holds_alternative<CounterHalt>(instr)) {
            result.halted = true;
            break;
        }
        if (result.steps >= fuel) break;
        if (const auto* inc = std::get_if<CounterInc>(&instr)) {
            auto& c = result.counters[inc->counter];
            if (c == std::numeric_limits<Counter>::max()) throw OverflowError("counter overflow in mcm_run");
            ++c;
            result.max_value = std::max(result.max_value, c);
            state = inc->next;
        } else {
            const auto& jz = std::get<CounterJzDec>(instr);
            auto& c = result.counters[jz.counter];
            if (c == 0) {
                state = jz.if_zero;
            } else {
                --c;
                state = jz.if_pos;
            }
        }
        ++result.steps;
    }
    return result;
}

namespace detail {

// Allocates states for a counter program and fills them in any order.
template <typename Instr>
class ProgramBuilder {
public:
    explicit ProgramBuilder(Instr placeholder) : placeholder_(std::move(placeholder)) {}

    std::size_t reserve() {
        program_.push_back(placeholder_);
        return program_.size() - 1;
    }

    void set(std::size_t state, Instr instr) { program_.at(state) = std::move(instr); }

    template <typename MakeInc>
    std::size_t inc_chain(std::size_t times, std::size_t next, MakeInc make_inc) {
        for (std::size_t i = 0; i < times; ++i) {
            const auto s = reserve();
            set(s, make_inc(next));
            next = s;
        }
        return next;
    }

    std::vector<Instr> take() { return std::move(program_); }

private:
    Instr placeholder_;
    std::vector<Instr> program_;
};

}  // namespace detail

inline constexpr std::size_t kLeftCounter = 0;
inline constexpr std::size_t kRightCounter = 1;
inline constexpr std::size_t kScratchCounter = 2;

inline MultiCounterMachine two_stack_to_counters(const TwoStackMachine& tsm) {
    validate(tsm);
    const std::size_t base = tsm.alphabet_size + 1;
    detail::ProgramBuilder<CounterInstruction> b(CounterHalt{});
    auto inc = [](std::size_t counter) {
        return [counter](std::size_t next) { return CounterInstruction(CounterInc{counter, next}); };
    };

    std::vector<std::size_t> entry(tsm.program.size());
    for (auto& e : entry) e = b.reserve();

    auto stack_counter = [](StackId s) { return s == StackId::Left ? kLeftCounter : kRightCounter; };

    for (std::size_t i = 0; i < tsm.program.size(); ++i) {
        const auto& instr = tsm.program[i];
        if (const auto* push = std::get_if<Push>(&instr)) {
            // X := X * base + digit, via scratch.
            const auto x = stack_counter(push->stack);
            const auto times_base = entry[i];
            const auto move_back = b.reserve();
            b.set(times_base, CounterJzDec{x, move_back, b.inc_chain(base, times_base, inc(kScratchCounter))});
            const auto add_digit = b.inc_chain(push->symbol + 1, entry[push->next], inc(x));
            const auto back_inc = b.reserve();
            b.set(move_back, CounterJzDec{kScratchCounter, add_digit, back_inc});
            b.set(back_inc, CounterInc{x, move_back});
        } else if (const auto* pop = std::get_if<Pop>(&instr)) {
            // Divide X by base into scratch; the remainder selects the branch.
            const auto x = stack_counter(pop->stack);
            std::vector<std::size_t> divide(base);
            divide[0] = entry[i];
            for (std::size_t j = 1; j < base; ++j) divide[j] = b.reserve();
            const auto carry = b.reserve();
            b.set(carry, CounterInc{kScratchCounter, divide[0]});
            for (std::size_t j = 0; j < base; ++j) {
                const auto restore = b.reserve();
                const auto target = j == 0 ? entry[pop->on_empty] : entry[pop->on_symbol[j - 1]];
                const auto restore_inc = b.reserve();
                b.set(restore, CounterJzDec{kScratchCounter, target, restore_inc});
                b.set(restore_inc, CounterInc{x, restore});
                b.set(divide[j], CounterJzDec{x, restore, j + 1 < base ? divide[j + 1] : carry});
            }
        }
    }
    MultiCounterMachine mcm{3, b.take()};
    validate(mcm);
    return mcm;
}

inline std::int64_t mcm_step_bound(std::int64_t tsm_steps, std::size_t alphabet_size, std::size_t max_height) {
    const auto base = static_cast<std::int64_t>(alphabet_size) + 1;
    std::int64_t max_value = 1;
    for (std::size_t i = 0; i < max_height; ++i) max_value *= base;
    max_value -= 1;
    return tsm_steps * ((3 * base + 1) * max_value + base + 1);
}

// Stack numeral (top in the least significant digit) back to bottom..top symbols.
inline std::vector<Symbol> numeral_to_stack(Counter value, std::size_t alphabet_size) {
    const auto base = static_cast<Counter>(alphabet_size) + 1;
    std::vector<Symbol> top_first;
    while (value > 0) {
        const auto digit = value % base;
        if (digit == 0) throw DecodeError("stack numeral contains the reserved digit 0");
        top_first.push_back(static_cast<Symbol>(digit - 1));
        value /= base;
    }
    return {top_first.rbegin(), top_first.rend()};
}

inline Tape counters_to_tape(const std::vector<Counter>& counters, std::size_t alphabet_size, Symbol blank) {
    return stacks_to_tape(numeral_to_stack(counters.at(kLeftCounter), alphabet_size),
                          numeral_to_stack(counters.at(kRightCounter), alphabet_size), blank);
}

// ---------------------------------------------------------------------------
// Prime encoding into two counters

inline constexpr Counter kPrimes[] = {2, 3, 5, 7};
inline constexpr std::size_t kMaxEncodedCounters = 4;

inline Program k_counters_to_two(const MultiCounterMachine& mcm) {
    validate(mcm);
    if (mcm.counters > kMaxEncodedCounters) throw ValidationError("at most 4 counters can be prime-encoded");
    detail::ProgramBuilder<Instruction> b(Halt{});
    auto inc = [](CounterId c) { return [c](std::size_t next) { return Instruction(Inc{c, static_cast<StateId>(next)}); }; };
    auto id = [](std::size_t s) { return static_cast<StateId>(s); };

    const auto bootstrap = b.reserve();
    std::vector<std::size_t> entry(mcm.program.size());
    for (auto& e : entry) e = b.reserve();
    b.set(bootstrap, Inc{CounterId::A, id(entry[0])});

    for (std::size_t i = 0; i < mcm.program.size(); ++i) {
        const auto& instr = mcm.program[i];
        if (const auto* ci = std::get_if<CounterInc>(&instr)) {
            // A := A * p via B.
            const auto p = static_cast<std::size_t>(kPrimes[ci->counter]);
            const auto times_p = entry[i];
            const auto move_back = b.reserve();
            b.set(times_p, JzDec{CounterId::A, id(move_back), id(b.inc_chain(p, times_p, inc(CounterId::B)))});
            const auto back_inc = b.reserve();
            b.set(move_back, JzDec{CounterId::B, id(entry[ci->next]), id(back_inc)});
            b.set(back_inc, Inc{CounterId::A, id(move_back)});
        } else if (const auto* cj = std::get_if<CounterJzDec>(&instr)) {
            // Divide A by p into B; remainder 0 means the exponent is positive.
            const auto p = static_cast<std::size_t>(kPrimes[cj->counter]);
            std::vector<std::size_t> divide(p);
            divide[0] = entry[i];
            for (std::size_t j = 1; j < p; ++j) divide[j] = b.reserve();
            const auto carry = b.reserve();
            b.set(carry, Inc{CounterId::B, id(divide[0])});
            for (std::size_t j = 0; j < p; ++j) {
                const auto restore = b.reserve();
                if (j == 0) {
                    // A := B, i.e. the quotient: exponent decremented.
                    const auto back_inc = b.reserve();
                    b.set(restore, JzDec{CounterId::B, id(entry[cj->if_pos]), id(back_inc)});
                    b.set(back_inc, Inc{CounterId::A, id(restore)});
                } else {
                    // A := B * p + j, the original value.
                    const auto finish = b.inc_chain(j, entry[cj->if_zero], inc(CounterId::A));
                    b.set(restore, JzDec{CounterId::B, id(finish), id(b.inc_chain(p, restore, inc(CounterId::A)))});
                }
                b.set(divide[j], JzDec{CounterId::A, id(restore), id(j + 1 < p ? divide[j + 1] : carry)});
            }
        }
    }
    return Program(b.take());
}

inline std::int64_t two_counter_step_bound(std::int64_t mcm_steps, Counter max_product) {
    // bootstrap + per-step gadget cost + the final HALT
    return 1 + mcm_steps * (22 * max_product + 9) + 1;
}

// A = 2^c0 * 3^c1 * 5^c2 * 7^c3 with exactly the first k primes allowed.
inline std::vector<Counter> decode_counters(const Config& config, std::size_t k) {
    if (k > kMaxEncodedCounters) throw DecodeError("at most 4 counters can be decoded");
    auto a = config.a;
    if (a < 1) throw DecodeError("A = " + std::to_string(a) + " is not a positive product of primes");
    std::vector<Counter> out(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        while (a % kPrimes[i] == 0) {
            a /= kPrimes[i];
            ++out[i];
        }
    }
    if (a != 1) {
        throw DecodeError("A = " + std::to_string(config.a) + " has a prime factor outside the first " +
                          std::to_string(k) + " primes");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Whole pipeline

struct StageFuel {
    std::int64_t tm = 1'000'000;
    std::int64_t tsm = 1'000'000;
    std::int64_t mcm = 1'000'000;
    std::int64_t two_counter = 1'000'000;
};

struct StageOutcome {
    std::string stage;
    bool halted = false;
    std::int64_t steps = 0;
    std::optional<Tape> tape;  // absent when the stage did not halt
    std::string note;
};

struct PipelineReport {
    TwoStackMachine tsm;
    MultiCounterMachine mcm;
    Program program{std::vector<Instruction>{Halt{}}};
    std::vector<StageOutcome> stages;
    bool agree = true;
    std::string diverging_stage;
};

inline PipelineReport run_pipeline(const TuringMachine& tm, const StageFuel& fuel = {}) {
    PipelineReport report;
    report.tsm = tm_to_two_stack(tm);
    report.mcm = two_stack_to_counters(report.tsm);
    report.program = k_counters_to_two(report.mcm);

    const auto tm_result = tm_run(tm, fuel.tm);
    report.stages.push_back({"TM", tm_result.halted, tm_result.steps,
                             tm_result.halted ? std::optional<Tape>(tm_result.tape) : std::nullopt, ""});

    const auto tsm_result = tsm_run(report.tsm, fuel.tsm);
    report.stages.push_back({"2-stack", tsm_result.halted, tsm_result.steps,
                             tsm_result.halted ? std::optional<Tape>(stacks_to_tape(tsm_result.left, tsm_result.right, tm.blank))
                                               : std::nullopt,
                             ""});

    const auto mcm_result = mcm_run(report.mcm, fuel.mcm);
    StageOutcome mcm_stage{"3-counter", mcm_result.halted, mcm_result.steps, std::nullopt, ""};
    if (mcm_result.halted) {
        mcm_stage.tape = counters_to_tape(mcm_result.counters, tm.alphabet.size(), tm.blank);
        if (mcm_result.counters[kScratchCounter] != 0) mcm_stage.note = "scratch counter not zero";
    }
    report.stages.push_back(mcm_stage);

    StageOutcome cm2{"2-counter", false, 0, std::nullopt, ""};
    try {
        const auto run_result = run(report.program, fuel.two_counter);
        cm2.halted = run_result.halted;
        cm2.steps = run_result.machine_steps;
        if (run_result.halted) {
            const auto counters = decode_counters(run_result.final, report.mcm.counters);
            cm2.tape = counters_to_tape(counters, tm.alphabet.size(), tm.blank);
            if (run_result.final.b != 0) cm2.note = "scratch counter B not zero";
        }
    } catch (const OverflowError& e) {
        cm2.note = e.what();
    } catch (const DecodeError& e) {
        cm2.note = e.what();
    }
    report.stages.push_back(cm2);

    // A stage that ran out of fuel is inconclusive; every stage that halted
    // must decode to the TM's tape.
    const auto& reference = report.stages.front();
    for (std::size_t i = 1; i < report.stages.size(); ++i) {
        const auto& s = report.stages[i];
        const bool mismatch = (s.halted && reference.halted && s.tape != reference.tape) || !s.note.empty();
        if (mismatch) {
            report.agree = false;
            report.diverging_stage = s.stage;
            break;
        }
    }
    return report;
}

}  // namespace cm2cy::minsky
