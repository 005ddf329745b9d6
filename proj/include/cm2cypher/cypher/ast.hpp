#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cm2cypher/cypher/value.hpp"

namespace cm2cy::cypher {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class BinaryOperator { Add, Sub, Mul, Div, Eq, Neq, Lt, Le, Gt, Ge, And, Or };

inline const char* to_string(BinaryOperator op) {
    switch (op) {
        case BinaryOperator::Add: return "+";
        case BinaryOperator::Sub: return "-";
        case BinaryOperator::Mul: return "*";
        case BinaryOperator::Div: return "/";
        case BinaryOperator::Eq: return "=";
        case BinaryOperator::Neq: return "<>";
        case BinaryOperator::Lt: return "<";
        case BinaryOperator::Le: return "<=";
        case BinaryOperator::Gt: return ">";
        case BinaryOperator::Ge: return ">=";
        case BinaryOperator::And: return "AND";
        case BinaryOperator::Or: return "OR";
    }
    return "?";
}

struct IntLiteral { std::int64_t value; };
struct StringLiteral { std::string value; };
struct BoolLiteral { bool value; };
struct NullLiteral {};
struct Variable { std::string name; };
struct Parameter { std::string name; };
struct MapLiteral { std::vector<std::pair<std::string, ExprPtr>> entries; };
struct ListLiteral { std::vector<ExprPtr> items; };
struct PropertyAccess { ExprPtr subject; std::string key; };
struct IndexAccess { ExprPtr subject; ExprPtr index; };
struct BinaryOp { BinaryOperator op; ExprPtr lhs; ExprPtr rhs; };
struct Negate { ExprPtr operand; };
struct Not { ExprPtr operand; };

struct CaseArm {
    ExprPtr when;
    ExprPtr then;
};

struct SimpleCase {
    ExprPtr subject;
    std::vector<CaseArm> arms;
    ExprPtr otherwise;  // may be null
};

struct SearchedCase {
    std::vector<CaseArm> arms;
    ExprPtr otherwise;  // may be null
};

struct Reduce {
    std::string accumulator;
    ExprPtr init;
    std::string variable;
    ExprPtr list;
    ExprPtr body;
};

struct ListComprehension {
    std::string variable;
    ExprPtr list;
    ExprPtr filter;  // may be null
    ExprPtr map;     // may be null
};

enum class Function { Head, Range };

struct FunctionCall {
    Function function;
    std::vector<ExprPtr> args;
};

struct Expr {
    using Node = std::variant<IntLiteral, StringLiteral, BoolLiteral, NullLiteral, Variable, Parameter, MapLiteral,
                              ListLiteral, PropertyAccess, IndexAccess, BinaryOp, Negate, Not, SimpleCase,
                              SearchedCase, Reduce, ListComprehension, FunctionCall>;

    Position pos;
    Node node;
};

template <typename T>
ExprPtr make_expr(Position pos, T node) {
    return std::make_unique<Expr>(Expr{pos, Expr::Node(std::move(node))});
}

struct LetBinding {
    std::string name;
    ExprPtr expr;
    Position pos;
};

struct ReturnItem {
    ExprPtr expr;
    std::string alias;  // explicit AS name, or the item's source text
};

struct QueryAst {
    std::optional<std::string> dialect;  // version after CYPHER, e.g. "25"
    std::vector<LetBinding> bindings;
    std::vector<ReturnItem> items;
};

}  // namespace cm2cy::cypher
