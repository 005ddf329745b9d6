#pragma once

#include <array>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cm2cypher/cypher/value.hpp"

namespace cm2cy::cypher {

enum class TokenKind { Identifier, Keyword, Integer, String, Parameter, Punct, End };

struct Token {
    TokenKind kind = TokenKind::End;
    // Strings hold the unescaped content, keywords their source spelling.
    std::string lexeme;
    Position pos;
    std::size_t offset = 0;  // byte offset of the first character
    std::size_t length = 0;  // bytes in source

    bool is(TokenKind k, std::string_view text) const;
    bool is_punct(std::string_view p) const { return kind == TokenKind::Punct && lexeme == p; }
    bool is_keyword(std::string_view kw) const { return kind == TokenKind::Keyword && is(kind, kw); }
};

inline bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::toupper(static_cast<unsigned char>(a[i])) != std::toupper(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

inline bool Token::is(TokenKind k, std::string_view text) const {
    if (kind != k) return false;
    return k == TokenKind::Keyword ? iequals(lexeme, text) : lexeme == text;
}

inline std::string to_upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

// Reserved words recognised by the lexer. Those outside the evaluated subset
// are still classified so the parser can name them in UnsupportedFeature.
inline bool is_reserved_word(std::string_view word) {
    static constexpr std::string_view kWords[] = {
        "CYPHER", "LET",    "RETURN",  "AS",       "CASE",     "WHEN",     "THEN",   "ELSE",   "END",
        "IN",     "AND",    "OR",      "XOR",      "NOT",      "TRUE",     "FALSE",  "NULL",   "WHERE",
        "MATCH",  "OPTIONAL", "CREATE", "MERGE",   "SET",      "DELETE",   "DETACH", "REMOVE", "CALL",
        "WITH",   "UNWIND", "YIELD",   "FOREACH",  "LOAD",     "UNION",    "NEXT",   "ORDER",  "BY",
        "SKIP",   "LIMIT",  "DISTINCT", "IS",      "STARTS",   "ENDS",     "CONTAINS", "EXISTS", "REPEATABLE",
        "ELEMENTS", "FINISH", "USE",   "FILTER",   "TRANSACTIONS", "OF",   "ROWS",
    };
    for (auto w : kWords) {
        if (iequals(w, word)) return true;
    }
    return false;
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> tokenize() {
        std::vector<Token> tokens;
        for (;;) {
            skip_trivia();
            if (at_end()) break;
            tokens.push_back(next_token());
        }
        Token end;
        end.pos = here();
        end.offset = pos_;
        tokens.push_back(end);
        return tokens;
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }
    Position here() const { return {line_, column_}; }

    char advance() {
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            ++column_;
        }
        return c;
    }

    [[noreturn]] void fail(const std::string& message, Position pos) const {
        throw CypherError(ErrorKind::Syntax, message, pos);
    }

    void skip_trivia() {
        while (!at_end()) {
            const char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                const auto start = here();
                advance();
                advance();
                while (!(peek() == '*' && peek(1) == '/')) {
                    if (at_end()) fail("unterminated block comment", start);
                    advance();
                }
                advance();
                advance();
            } else {
                break;
            }
        }
    }

    static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    static bool ident_part(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    Token next_token() {
        Token tok;
        tok.pos = here();
        tok.offset = pos_;
        const char c = peek();

        if (ident_start(c)) {
            while (!at_end() && ident_part(peek())) advance();
            tok.lexeme = std::string(text_.substr(tok.offset, pos_ - tok.offset));
            tok.kind = is_reserved_word(tok.lexeme) ? TokenKind::Keyword : TokenKind::Identifier;
        } else if (c == '`') {
            advance();
            while (peek() != '`') {
                if (at_end()) fail("unterminated quoted identifier", tok.pos);
                tok.lexeme += advance();
            }
            advance();
            tok.kind = TokenKind::Identifier;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
            if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                throw CypherError(ErrorKind::UnsupportedFeature, "floating-point literal", tok.pos);
            }
            if (ident_part(peek())) fail("malformed number", tok.pos);
            tok.lexeme = std::string(text_.substr(tok.offset, pos_ - tok.offset));
            tok.kind = TokenKind::Integer;
        } else if (c == '\'' || c == '"') {
            tok.lexeme = string_literal(c, tok.pos);
            tok.kind = TokenKind::String;
        } else if (c == '$') {
            advance();
            const auto start = pos_;
            while (!at_end() && ident_part(peek())) advance();
            if (start == pos_) fail("expected parameter name after '$'", tok.pos);
            tok.lexeme = std::string(text_.substr(start, pos_ - start));
            tok.kind = TokenKind::Parameter;
        } else {
            static constexpr std::array<std::string_view, 8> kTwo = {"<>", "<=", ">=", "!=", "->", "<-", "=~", ".."};
            tok.kind = TokenKind::Punct;
            for (auto p : kTwo) {
                if (text_.substr(pos_, 2) == p) {
                    advance();
                    advance();
                    tok.lexeme = std::string(p);
                    break;
                }
            }
            if (tok.lexeme.empty()) {
                static constexpr std::string_view kOne = "()[]{},.:;|+-*/%^=<>&!?";
                if (kOne.find(c) == std::string_view::npos) {
                    fail(std::string("illegal character '") + c + "'", tok.pos);
                }
                tok.lexeme = std::string(1, advance());
            }
        }
        tok.length = pos_ - tok.offset;
        return tok;
    }

    std::string string_literal(char quote, Position start) {
        advance();
        std::string out;
        for (;;) {
            if (at_end()) fail("unterminated string literal", start);
            const char c = advance();
            if (c == quote) break;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (at_end()) fail("unterminated string literal", start);
            const char e = advance();
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case 'b': out += '\b'; break;
                case 'f': out += '\f'; break;
                case '\\': case '\'': case '"': out += e; break;
                default: fail(std::string("unknown escape '\\") + e + "'", start);
            }
        }
        return out;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

inline std::vector<Token> tokenize(std::string_view text) { return Lexer(text).tokenize(); }

}  // namespace cm2cy::cypher
