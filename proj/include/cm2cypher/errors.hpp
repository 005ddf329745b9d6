#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cm2cy {

// Base for every error thrown by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A counter would leave the signed 64-bit range.
class OverflowError : public Error {
public:
    using Error::Error;
};

// Program or machine violates a structural invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// qpp_walk ran out of fuel before reaching a Halt state.
class NoPathError : public Error {
public:
    using Error::Error;
};

// Malformed program document or TM fixture.
class SchemaError : public Error {
public:
    using Error::Error;
};

// A counter value does not decode under the expected encoding.
class DecodeError : public Error {
public:
    using Error::Error;
};

// Syntax error in the counter-machine DSL, 1-based line and column.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace cm2cy
