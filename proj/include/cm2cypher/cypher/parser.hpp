#pragma once

// Recursive-descent parser for the evaluated Cypher subset:
//
//   query      := [CYPHER <int>] (LET name = expr {, name = expr})* RETURN item {, item} [;]
//   item       := expr [AS name]
//   expr       := or
//   or         := and {OR and}
//   and        := not {AND not}
//   not        := NOT not | comparison
//   comparison := additive [(= | <> | < | <= | > | >=) additive]
//   additive   := multiplicative {(+ | -) multiplicative}
//   multiplicative := unary {(* | /) unary}
//   unary      := - unary | + unary | postfix
//   postfix    := atom {. key | [ expr ]}
//   atom       := literal | $param | variable | ( expr ) | list | comprehension | map
//               | CASE ... END | reduce(acc = e, x IN e | e) | head(e) | range(e, e [, e])
//
// Everything else that Cypher accepts is rejected with UnsupportedFeature
// naming the construct.

#include <charconv>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cm2cypher/cypher/ast.hpp"
#include "cm2cypher/cypher/lexer.hpp"

namespace cm2cy::cypher {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text), tokens_(tokenize(text)) {}

    QueryAst parse_query() {
        QueryAst ast;
        if (peek().is_keyword("CYPHER")) {
            advance();
            if (peek().kind != TokenKind::Integer) fail("expected version number after CYPHER");
            ast.dialect = advance().lexeme;
        }

        std::set<std::string> names;
        while (peek().is_keyword("LET")) {
            advance();
            do {
                const auto& name_tok = peek();
                const auto name = expect_identifier("binding name");
                if (!names.insert(name).second) {
                    fail("duplicate LET binding '" + name + "'", name_tok.pos);
                }
                expect_punct("=");
                ast.bindings.push_back(LetBinding{name, parse_expression(), name_tok.pos});
            } while (accept_punct(","));
        }

        if (!peek().is_keyword("RETURN")) {
            reject_clause();
            fail("expected LET or RETURN");
        }
        advance();
        std::set<std::string> aliases;
        do {
            const auto start = peek();
            ReturnItem item;
            item.expr = parse_expression();
            if (peek().is_keyword("AS")) {
                advance();
                item.alias = expect_identifier("column alias");
            } else if (const auto* var = std::get_if<Variable>(&item.expr->node)) {
                item.alias = var->name;
            } else {
                const auto& last = tokens_[index_ - 1];
                item.alias = std::string(text_.substr(start.offset, last.offset + last.length - start.offset));
            }
            if (!aliases.insert(item.alias).second) fail("duplicate column '" + item.alias + "'", start.pos);
            ast.items.push_back(std::move(item));
        } while (accept_punct(","));

        accept_punct(";");
        if (peek().kind != TokenKind::End) {
            reject_clause();
            fail("unexpected '" + peek().lexeme + "' after RETURN");
        }
        return ast;
    }

    ExprPtr parse_standalone_expression() {
        auto expr = parse_expression();
        if (peek().kind != TokenKind::End) fail("unexpected '" + peek().lexeme + "' after expression");
        return expr;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        const auto i = std::min(index_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }

    const Token& advance() {
        const auto& tok = tokens_[index_];
        if (index_ + 1 < tokens_.size()) ++index_;
        return tok;
    }

    [[noreturn]] void fail(const std::string& message) const { fail(message, peek().pos); }
    [[noreturn]] void fail(const std::string& message, Position pos) const {
        throw CypherError(ErrorKind::Syntax, message, pos);
    }
    [[noreturn]] void unsupported(const std::string& what, Position pos) const {
        throw CypherError(ErrorKind::UnsupportedFeature, what, pos);
    }

    // Any reserved word other than the subset's own is an out-of-subset clause.
    void reject_clause() const {
        const auto& tok = peek();
        if (tok.kind == TokenKind::Keyword) unsupported(to_upper(tok.lexeme), tok.pos);
    }

    bool accept_punct(std::string_view p) {
        if (!peek().is_punct(p)) return false;
        advance();
        return true;
    }

    void expect_punct(std::string_view p) {
        if (!accept_punct(p)) {
            const auto& tok = peek();
            fail("expected '" + std::string(p) + "' but found " +
                 (tok.kind == TokenKind::End ? std::string("end of input") : "'" + tok.lexeme + "'"));
        }
    }

    void expect_keyword(std::string_view kw) {
        if (!peek().is_keyword(kw)) fail("expected " + std::string(kw));
        advance();
    }

    std::string expect_identifier(const char* what) {
        if (peek().kind != TokenKind::Identifier) {
            reject_clause();
            fail(std::string("expected ") + what);
        }
        return advance().lexeme;
    }

    // Map keys and property names may be any symbolic name, keywords included.
    std::string expect_key() {
        const auto& tok = peek();
        if (tok.kind != TokenKind::Identifier && tok.kind != TokenKind::Keyword) fail("expected property key");
        return advance().lexeme;
    }

    ExprPtr parse_expression() { return parse_or(); }

    // Operands are parsed into locals before the node is built: GCC 11 leaks
    // the already-moved members when a braced initializer throws midway.
    ExprPtr parse_or() {
        auto lhs = parse_and();
        while (peek().is_keyword("OR")) {
            const auto pos = advance().pos;
            auto rhs = parse_and();
            lhs = make_expr(pos, BinaryOp{BinaryOperator::Or, std::move(lhs), std::move(rhs)});
        }
        if (peek().is_keyword("XOR")) unsupported("XOR", peek().pos);
        return lhs;
    }

    ExprPtr parse_and() {
        auto lhs = parse_not();
        while (peek().is_keyword("AND")) {
            const auto pos = advance().pos;
            auto rhs = parse_not();
            lhs = make_expr(pos, BinaryOp{BinaryOperator::And, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    ExprPtr parse_not() {
        if (peek().is_keyword("NOT")) {
            const auto pos = advance().pos;
            return make_expr(pos, Not{parse_not()});
        }
        return parse_comparison();
    }

    static std::optional<BinaryOperator> comparison_operator(const Token& tok) {
        if (tok.kind != TokenKind::Punct) return std::nullopt;
        if (tok.lexeme == "=") return BinaryOperator::Eq;
        if (tok.lexeme == "<>") return BinaryOperator::Neq;
        if (tok.lexeme == "<") return BinaryOperator::Lt;
        if (tok.lexeme == "<=") return BinaryOperator::Le;
        if (tok.lexeme == ">") return BinaryOperator::Gt;
        if (tok.lexeme == ">=") return BinaryOperator::Ge;
        return std::nullopt;
    }

    ExprPtr parse_comparison() {
        auto lhs = parse_additive();
        if (const auto op = comparison_operator(peek())) {
            const auto pos = advance().pos;
            auto rhs = parse_additive();
            lhs = make_expr(pos, BinaryOp{*op, std::move(lhs), std::move(rhs)});
            if (comparison_operator(peek())) unsupported("chained comparison", peek().pos);
        }
        const auto& tok = peek();
        if (tok.is_keyword("IS") || tok.is_keyword("STARTS") || tok.is_keyword("ENDS") ||
            tok.is_keyword("CONTAINS") || tok.is_keyword("IN")) {
            unsupported(to_upper(tok.lexeme) + " predicate", tok.pos);
        }
        if (tok.is_punct("=~")) unsupported("regular expression match", tok.pos);
        return lhs;
    }

    ExprPtr parse_additive() {
        auto lhs = parse_multiplicative();
        for (;;) {
            BinaryOperator op;
            if (peek().is_punct("+")) {
                op = BinaryOperator::Add;
            } else if (peek().is_punct("-")) {
                op = BinaryOperator::Sub;
            } else {
                return lhs;
            }
            const auto pos = advance().pos;
            auto rhs = parse_multiplicative();
            lhs = make_expr(pos, BinaryOp{op, std::move(lhs), std::move(rhs)});
        }
    }

    ExprPtr parse_multiplicative() {
        auto lhs = parse_unary();
        for (;;) {
            BinaryOperator op;
            if (peek().is_punct("*")) {
                op = BinaryOperator::Mul;
            } else if (peek().is_punct("/")) {
                op = BinaryOperator::Div;
            } else if (peek().is_punct("%") || peek().is_punct("^")) {
                unsupported("operator '" + peek().lexeme + "'", peek().pos);
            } else {
                return lhs;
            }
            const auto pos = advance().pos;
            auto rhs = parse_unary();
            lhs = make_expr(pos, BinaryOp{op, std::move(lhs), std::move(rhs)});
        }
    }

    ExprPtr parse_unary() {
        if (peek().is_punct("-")) {
            const auto pos = advance().pos;
            // Fold -<literal> so that -9223372036854775808 is representable.
            if (peek().kind == TokenKind::Integer) {
                const auto& lit = advance();
                return parse_postfix(make_expr(pos, IntLiteral{integer_value(lit, true)}));
            }
            return make_expr(pos, Negate{parse_unary()});
        }
        if (peek().is_punct("+")) {
            advance();
            return parse_unary();
        }
        return parse_postfix(parse_atom());
    }

    ExprPtr parse_postfix(ExprPtr expr) {
        for (;;) {
            if (peek().is_punct(".")) {
                const auto pos = advance().pos;
                auto key = expect_key();
                if (peek().is_punct("(")) unsupported("function " + dotted_name(*expr) + "." + key, expr->pos);
                expr = make_expr(pos, PropertyAccess{std::move(expr), std::move(key)});
            } else if (peek().is_punct("[")) {
                const auto pos = advance().pos;
                if (peek().is_punct("..")) unsupported("list slice", peek().pos);
                auto index = parse_expression();
                if (peek().is_punct("..")) unsupported("list slice", peek().pos);
                expect_punct("]");
                expr = make_expr(pos, IndexAccess{std::move(expr), std::move(index)});
            } else if (peek().is_punct(":")) {
                unsupported("label expression", peek().pos);
            } else if (peek().is_punct("{")) {
                unsupported("map projection", peek().pos);
            } else {
                return expr;
            }
        }
    }

    static std::string dotted_name(const Expr& expr) {
        if (const auto* v = std::get_if<Variable>(&expr.node)) return v->name;
        if (const auto* p = std::get_if<PropertyAccess>(&expr.node)) return dotted_name(*p->subject) + "." + p->key;
        return "<expression>";
    }

    std::int64_t integer_value(const Token& tok, bool negative) const {
        // Parse as unsigned magnitude so INT64_MIN survives the round trip.
        std::uint64_t magnitude = 0;
        const auto* first = tok.lexeme.data();
        const auto* last = first + tok.lexeme.size();
        const auto [ptr, ec] = std::from_chars(first, last, magnitude);
        const auto limit = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) + (negative ? 1 : 0);
        if (ec != std::errc() || ptr != last || magnitude > limit) {
            throw CypherError(ErrorKind::Overflow, "integer literal " + tok.lexeme + " exceeds 64-bit range", tok.pos);
        }
        if (negative) return magnitude == limit ? std::numeric_limits<std::int64_t>::min() : -static_cast<std::int64_t>(magnitude);
        return static_cast<std::int64_t>(magnitude);
    }

    ExprPtr parse_atom() {
        const auto& tok = peek();
        const auto pos = tok.pos;
        switch (tok.kind) {
            case TokenKind::Integer: {
                const auto& lit = advance();
                return make_expr(pos, IntLiteral{integer_value(lit, false)});
            }
            case TokenKind::String: return make_expr(pos, StringLiteral{advance().lexeme});
            case TokenKind::Parameter: return make_expr(pos, Parameter{advance().lexeme});
            case TokenKind::Keyword: {
                if (tok.is_keyword("TRUE")) return (advance(), make_expr(pos, BoolLiteral{true}));
                if (tok.is_keyword("FALSE")) return (advance(), make_expr(pos, BoolLiteral{false}));
                if (tok.is_keyword("NULL")) return (advance(), make_expr(pos, NullLiteral{}));
                if (tok.is_keyword("CASE")) return parse_case();
                unsupported(to_upper(tok.lexeme), pos);
            }
            case TokenKind::Identifier: return parse_identifier();
            case TokenKind::Punct:
                if (tok.is_punct("(")) {
                    advance();
                    auto inner = parse_expression();
                    expect_punct(")");
                    return inner;
                }
                if (tok.is_punct("[")) return parse_list();
                if (tok.is_punct("{")) return parse_map();
                fail("unexpected '" + tok.lexeme + "'");
            case TokenKind::End: fail("unexpected end of input");
        }
        fail("unexpected token");
    }

    ExprPtr parse_identifier() {
        const auto& tok = advance();
        const auto pos = tok.pos;
        const auto name = tok.lexeme;
        if (!peek().is_punct("(")) return make_expr(pos, Variable{name});

        if (iequals(name, "reduce")) return parse_reduce(pos);
        std::optional<Function> fn;
        std::size_t min_args = 1, max_args = 1;
        if (iequals(name, "head")) {
            fn = Function::Head;
        } else if (iequals(name, "range")) {
            fn = Function::Range;
            min_args = 2;
            max_args = 3;
        } else {
            unsupported("function " + name, pos);
        }
        advance();
        FunctionCall call{*fn, {}};
        if (!peek().is_punct(")")) {
            do {
                call.args.push_back(parse_expression());
            } while (accept_punct(","));
        }
        expect_punct(")");
        if (call.args.size() < min_args || call.args.size() > max_args) {
            fail(name + "() takes " + std::to_string(min_args) +
                     (min_args == max_args ? "" : " to " + std::to_string(max_args)) + " argument(s)",
                 pos);
        }
        return make_expr(pos, std::move(call));
    }

    ExprPtr parse_reduce(Position pos) {
        expect_punct("(");
        Reduce r;
        r.accumulator = expect_identifier("accumulator name");
        expect_punct("=");
        r.init = parse_expression();
        expect_punct(",");
        r.variable = expect_identifier("iteration variable");
        expect_keyword("IN");
        r.list = parse_expression();
        expect_punct("|");
        r.body = parse_expression();
        expect_punct(")");
        return make_expr(pos, std::move(r));
    }

    ExprPtr parse_list() {
        const auto pos = advance().pos;
        if (peek().kind == TokenKind::Identifier && peek(1).is_keyword("IN")) {
            ListComprehension lc;
            lc.variable = advance().lexeme;
            advance();
            lc.list = parse_expression();
            if (peek().is_keyword("WHERE")) {
                advance();
                lc.filter = parse_expression();
            }
            if (accept_punct("|")) lc.map = parse_expression();
            expect_punct("]");
            return make_expr(pos, std::move(lc));
        }
        ListLiteral list;
        if (!peek().is_punct("]")) {
            do {
                list.items.push_back(parse_expression());
            } while (accept_punct(","));
        }
        expect_punct("]");
        return make_expr(pos, std::move(list));
    }

    ExprPtr parse_map() {
        const auto pos = advance().pos;
        MapLiteral map;
        std::set<std::string> keys;
        if (!peek().is_punct("}")) {
            do {
                const auto key_pos = peek().pos;
                auto key = expect_key();
                if (!keys.insert(key).second) fail("duplicate map key '" + key + "'", key_pos);
                expect_punct(":");
                map.entries.emplace_back(std::move(key), parse_expression());
            } while (accept_punct(","));
        }
        expect_punct("}");
        return make_expr(pos, std::move(map));
    }

    ExprPtr parse_case() {
        const auto pos = advance().pos;
        ExprPtr subject;
        if (!peek().is_keyword("WHEN")) subject = parse_expression();
        std::vector<CaseArm> arms;
        while (peek().is_keyword("WHEN")) {
            advance();
            CaseArm arm;
            arm.when = parse_expression();
            if (peek().is_punct(",")) unsupported("multiple CASE WHEN operands", peek().pos);
            expect_keyword("THEN");
            arm.then = parse_expression();
            arms.push_back(std::move(arm));
        }
        if (arms.empty()) fail("CASE requires at least one WHEN");
        ExprPtr otherwise;
        if (peek().is_keyword("ELSE")) {
            advance();
            otherwise = parse_expression();
        }
        expect_keyword("END");
        if (subject) return make_expr(pos, SimpleCase{std::move(subject), std::move(arms), std::move(otherwise)});
        return make_expr(pos, SearchedCase{std::move(arms), std::move(otherwise)});
    }

    std::string_view text_;
    std::vector<Token> tokens_;
    std::size_t index_ = 0;
};

inline QueryAst parse_query(std::string_view text) { return Parser(text).parse_query(); }
inline ExprPtr parse_expression(std::string_view text) { return Parser(text).parse_standalone_expression(); }

}  // namespace cm2cy::cypher
