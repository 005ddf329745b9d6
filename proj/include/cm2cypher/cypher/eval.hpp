#pragma once

// Tree-walking evaluator for the Cypher subset.
//
// Semantics pinned here (and by tests):
//  - integer-only arithmetic, overflow is an error, `/` truncates toward zero
//  - null propagates through arithmetic, comparison and property/index access
//  - AND / OR / NOT use three-valued logic; AND and OR skip the right operand
//    when the left one already decides the result
//  - simple CASE compares with `=`, so a null subject or null arm never matches
//  - CASE without a matching arm and without ELSE yields null
//  - list[i]: negative i counts from the end, out of range yields null
//  - range(a, b[, step]) is inclusive of both ends
//  - reduce over a non-list (null included) is a TypeMismatch

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cm2cypher/cypher/ast.hpp"
#include "cm2cypher/cypher/value.hpp"

namespace cm2cy::cypher {

using Parameters = std::map<std::string, Value, std::less<>>;

// Lexically scoped variable stack; lookups search innermost first.
class Environment {
public:
    void push(const std::string& name, Value value) { frames_.emplace_back(&name, std::move(value)); }
    void pop() { frames_.pop_back(); }
    void set_top(Value value) { frames_.back().second = std::move(value); }
    std::size_t depth() const noexcept { return frames_.size(); }

    const Value* find(const std::string& name) const {
        for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
            if (*it->first == name) return &it->second;
        }
        return nullptr;
    }

private:
    std::vector<std::pair<const std::string*, Value>> frames_;
};

// Upper bound on lists produced by range() outside a reduce source.
inline constexpr std::int64_t kMaxMaterializedRange = 100'000'000;

class Evaluator {
public:
    explicit Evaluator(const Parameters& parameters) : parameters_(parameters) {}

    Value eval(const Expr& expr, Environment& env) const {
        return std::visit([&](const auto& node) { return eval_node(node, expr.pos, env); }, expr.node);
    }

private:
    [[noreturn]] static void fail(ErrorKind kind, const std::string& message, Position pos) {
        throw CypherError(kind, message, pos);
    }

    static std::int64_t require_int(const Value& v, const char* what, Position pos) {
        if (!v.is_int()) fail(ErrorKind::TypeMismatch, std::string(what) + " must be INTEGER, got " + v.type_name(), pos);
        return v.as_int();
    }

    // Returns nullopt for null, throws on non-boolean.
    static std::optional<bool> truth(const Value& v, const char* what, Position pos) {
        if (v.is_null()) return std::nullopt;
        if (!v.is_bool()) fail(ErrorKind::TypeMismatch, std::string(what) + " must be BOOLEAN, got " + v.type_name(), pos);
        return v.as_bool();
    }

    Value eval_node(const IntLiteral& n, Position, Environment&) const { return Value::integer(n.value); }
    Value eval_node(const StringLiteral& n, Position, Environment&) const { return Value::text(n.value); }
    Value eval_node(const BoolLiteral& n, Position, Environment&) const { return Value::boolean(n.value); }
    Value eval_node(const NullLiteral&, Position, Environment&) const { return {}; }

    Value eval_node(const Variable& n, Position pos, Environment& env) const {
        if (const auto* v = env.find(n.name)) return *v;
        fail(ErrorKind::UnknownVariable, "variable '" + n.name + "' is not defined", pos);
    }

    Value eval_node(const Parameter& n, Position pos, Environment&) const {
        if (auto it = parameters_.find(n.name); it != parameters_.end()) return it->second;
        fail(ErrorKind::UnknownParameter, "parameter $" + n.name + " was not supplied", pos);
    }

    Value eval_node(const MapLiteral& n, Position, Environment& env) const {
        Value::Map entries;
        entries.reserve(n.entries.size());
        for (const auto& [key, value] : n.entries) entries.emplace_back(key, eval(*value, env));
        return Value::map(std::move(entries));
    }

    Value eval_node(const ListLiteral& n, Position, Environment& env) const {
        Value::List items;
        items.reserve(n.items.size());
        for (const auto& item : n.items) items.push_back(eval(*item, env));
        return Value::list(std::move(items));
    }

    Value eval_node(const PropertyAccess& n, Position pos, Environment& env) const {
        const auto subject = eval(*n.subject, env);
        if (subject.is_null()) return {};
        if (!subject.is_map()) fail(ErrorKind::TypeMismatch, "property access on " + subject.type_name(), pos);
        return subject.get(n.key);
    }

    Value eval_node(const IndexAccess& n, Position pos, Environment& env) const {
        const auto subject = eval(*n.subject, env);
        const auto index = eval(*n.index, env);
        if (subject.is_null() || index.is_null()) return {};
        if (subject.is_map()) {
            if (!index.is_text()) fail(ErrorKind::TypeMismatch, "map key must be STRING, got " + index.type_name(), pos);
            return subject.get(index.as_text());
        }
        if (!subject.is_list()) fail(ErrorKind::TypeMismatch, "cannot index " + subject.type_name(), pos);
        const auto& list = subject.as_list();
        auto i = require_int(index, "list index", pos);
        const auto size = static_cast<std::int64_t>(list.size());
        if (i < 0) i += size;
        if (i < 0 || i >= size) return {};
        return list[static_cast<std::size_t>(i)];
    }

    static Value arithmetic(BinaryOperator op, const Value& l, const Value& r, Position pos) {
        if (l.is_null() || r.is_null()) return {};
        if (op == BinaryOperator::Add) {
            if (l.is_text() && r.is_text()) return Value::text(l.as_text() + r.as_text());
            if (l.is_list() || r.is_list()) {
                Value::List items;
                auto append = [&items](const Value& v) {
                    if (v.is_list()) {
                        items.insert(items.end(), v.as_list().begin(), v.as_list().end());
                    } else {
                        items.push_back(v);
                    }
                };
                append(l);
                append(r);
                return Value::list(std::move(items));
            }
        }
        if (!l.is_int() || !r.is_int()) {
            fail(ErrorKind::TypeMismatch,
                 std::string("operator ") + to_string(op) + " on " + l.type_name() + " and " + r.type_name(), pos);
        }
        const auto a = l.as_int();
        const auto b = r.as_int();
        std::int64_t out = 0;
        bool overflow = false;
        switch (op) {
            case BinaryOperator::Add: overflow = __builtin_add_overflow(a, b, &out); break;
            case BinaryOperator::Sub: overflow = __builtin_sub_overflow(a, b, &out); break;
            case BinaryOperator::Mul: overflow = __builtin_mul_overflow(a, b, &out); break;
            case BinaryOperator::Div:
                if (b == 0) fail(ErrorKind::DivisionByZero, "/ by zero", pos);
                if (a == std::numeric_limits<std::int64_t>::min() && b == -1) {
                    overflow = true;
                } else {
                    out = a / b;
                }
                break;
            default: break;
        }
        if (overflow) fail(ErrorKind::Overflow, "integer overflow in " + std::string(to_string(op)), pos);
        return Value::integer(out);
    }

    static Value compare(BinaryOperator op, const Value& l, const Value& r) {
        if (op == BinaryOperator::Eq || op == BinaryOperator::Neq) {
            const auto eq = cypher_equals(l, r);
            if (!eq) return {};
            return Value::boolean(op == BinaryOperator::Eq ? *eq : !*eq);
        }
        int order = 0;
        if (l.is_int() && r.is_int()) {
            order = l.as_int() < r.as_int() ? -1 : l.as_int() > r.as_int() ? 1 : 0;
        } else if (l.is_text() && r.is_text()) {
            order = l.as_text().compare(r.as_text());
        } else if (l.is_bool() && r.is_bool()) {
            order = static_cast<int>(l.as_bool()) - static_cast<int>(r.as_bool());
        } else {
            return {};  // null or incomparable
        }
        switch (op) {
            case BinaryOperator::Lt: return Value::boolean(order < 0);
            case BinaryOperator::Le: return Value::boolean(order <= 0);
            case BinaryOperator::Gt: return Value::boolean(order > 0);
            default: return Value::boolean(order >= 0);
        }
    }

    Value eval_node(const BinaryOp& n, Position pos, Environment& env) const {
        if (n.op == BinaryOperator::And || n.op == BinaryOperator::Or) {
            // The left operand decides alone when it is the absorbing value.
            const bool is_and = n.op == BinaryOperator::And;
            const auto l = truth(eval(*n.lhs, env), to_string(n.op), pos);
            if (l == !is_and) return Value::boolean(!is_and);
            const auto r = truth(eval(*n.rhs, env), to_string(n.op), pos);
            if (r == !is_and) return Value::boolean(!is_and);
            if (!l || !r) return {};
            return Value::boolean(is_and);  // both true for AND, both false for OR
        }
        const auto l = eval(*n.lhs, env);
        const auto r = eval(*n.rhs, env);
        switch (n.op) {
            case BinaryOperator::Add:
            case BinaryOperator::Sub:
            case BinaryOperator::Mul:
            case BinaryOperator::Div: return arithmetic(n.op, l, r, pos);
            default: return compare(n.op, l, r);
        }
    }

    Value eval_node(const Negate& n, Position pos, Environment& env) const {
        const auto v = eval(*n.operand, env);
        if (v.is_null()) return {};
        const auto i = require_int(v, "operand of unary -", pos);
        if (i == std::numeric_limits<std::int64_t>::min()) fail(ErrorKind::Overflow, "integer overflow in unary -", pos);
        return Value::integer(-i);
    }

    Value eval_node(const Not& n, Position pos, Environment& env) const {
        const auto t = truth(eval(*n.operand, env), "operand of NOT", pos);
        if (!t) return {};
        return Value::boolean(!*t);
    }

    Value eval_node(const SimpleCase& n, Position, Environment& env) const {
        const auto subject = eval(*n.subject, env);
        for (const auto& arm : n.arms) {
            if (cypher_equals(subject, eval(*arm.when, env)) == true) return eval(*arm.then, env);
        }
        return n.otherwise ? eval(*n.otherwise, env) : Value();
    }

    Value eval_node(const SearchedCase& n, Position, Environment& env) const {
        for (const auto& arm : n.arms) {
            if (truth(eval(*arm.when, env), "CASE WHEN condition", arm.when->pos) == true) return eval(*arm.then, env);
        }
        return n.otherwise ? eval(*n.otherwise, env) : Value();
    }

    struct RangeBounds {
        std::int64_t start;
        std::int64_t end;
        std::int64_t step;

        // Number of elements, saturating at INT64_MAX.
        std::int64_t count() const {
            if ((step > 0 && start > end) || (step < 0 && start < end)) return 0;
            const auto span = step > 0 ? static_cast<unsigned __int128>(end) - static_cast<unsigned __int128>(start)
                                       : static_cast<unsigned __int128>(start) - static_cast<unsigned __int128>(end);
            const auto magnitude = static_cast<unsigned __int128>(step > 0 ? step : -static_cast<__int128>(step));
            const auto n = span / magnitude + 1;
            return n > static_cast<unsigned __int128>(std::numeric_limits<std::int64_t>::max())
                       ? std::numeric_limits<std::int64_t>::max()
                       : static_cast<std::int64_t>(n);
        }

        std::int64_t at(std::int64_t i) const {
            return static_cast<std::int64_t>(static_cast<__int128>(start) + static_cast<__int128>(i) * step);
        }
    };

    RangeBounds range_bounds(const FunctionCall& call, Position pos, Environment& env) const {
        RangeBounds bounds{};
        const auto start = eval(*call.args[0], env);
        const auto end = eval(*call.args[1], env);
        bounds.start = require_int(start, "range() start", pos);
        bounds.end = require_int(end, "range() end", pos);
        bounds.step = 1;
        if (call.args.size() == 3) bounds.step = require_int(eval(*call.args[2], env), "range() step", pos);
        if (bounds.step == 0) fail(ErrorKind::InvalidArgument, "range() step must not be zero", pos);
        return bounds;
    }

    Value eval_node(const FunctionCall& n, Position pos, Environment& env) const {
        if (n.function == Function::Head) {
            const auto v = eval(*n.args[0], env);
            if (v.is_null()) return {};
            if (!v.is_list()) fail(ErrorKind::TypeMismatch, "head() expects LIST, got " + v.type_name(), pos);
            return v.as_list().empty() ? Value() : v.as_list().front();
        }
        const auto bounds = range_bounds(n, pos, env);
        const auto count = bounds.count();
        if (count > kMaxMaterializedRange) {
            fail(ErrorKind::InvalidArgument, "range() of " + std::to_string(count) + " elements is too large", pos);
        }
        Value::List items;
        items.reserve(static_cast<std::size_t>(count));
        for (std::int64_t i = 0; i < count; ++i) items.push_back(Value::integer(bounds.at(i)));
        return Value::list(std::move(items));
    }

    Value eval_node(const Reduce& n, Position pos, Environment& env) const {
        auto acc = eval(*n.init, env);

        // A range() source is iterated without materializing the list.
        if (const auto* call = std::get_if<FunctionCall>(&n.list->node); call && call->function == Function::Range) {
            const auto bounds = range_bounds(*call, n.list->pos, env);
            const auto count = bounds.count();
            for (std::int64_t i = 0; i < count; ++i) acc = fold_step(n, std::move(acc), Value::integer(bounds.at(i)), env);
            return acc;
        }

        const auto list = eval(*n.list, env);
        if (!list.is_list()) fail(ErrorKind::TypeMismatch, "reduce() over " + list.type_name(), pos);
        for (const auto& item : list.as_list()) acc = fold_step(n, std::move(acc), item, env);
        return acc;
    }

    Value fold_step(const Reduce& n, Value acc, Value item, Environment& env) const {
        env.push(n.accumulator, std::move(acc));
        env.push(n.variable, std::move(item));
        struct Unwind {
            Environment& env;
            ~Unwind() {
                env.pop();
                env.pop();
            }
        } unwind{env};
        return eval(*n.body, env);
    }

    Value eval_node(const ListComprehension& n, Position pos, Environment& env) const {
        const auto list = eval(*n.list, env);
        if (list.is_null()) return {};
        if (!list.is_list()) fail(ErrorKind::TypeMismatch, "list comprehension over " + list.type_name(), pos);
        Value::List out;
        out.reserve(list.as_list().size());
        env.push(n.variable, Value());
        struct Unwind {
            Environment& env;
            ~Unwind() { env.pop(); }
        } unwind{env};
        for (const auto& item : list.as_list()) {
            env.set_top(item);
            if (n.filter && truth(eval(*n.filter, env), "WHERE predicate", n.filter->pos) != true) continue;
            out.push_back(n.map ? eval(*n.map, env) : item);
        }
        return Value::list(std::move(out));
    }

    const Parameters& parameters_;
};

inline Value evaluate(const Expr& expr, Environment& env, const Parameters& parameters = {}) {
    return Evaluator(parameters).eval(expr, env);
}

}  // namespace cm2cy::cypher
