#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pmkit {

// Base of every error the library throws. The CLI maps these to exit status 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input text could not be parsed. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error(format(what, line, column)), line_(line), column_(column), message_(what) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        if (line == 0) return what;
        std::string out = std::to_string(line);
        if (column != 0) out += ":" + std::to_string(column);
        return out + ": " + what;
    }

    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

// A model or log violates a structural requirement (missing column, dangling arc, ...).
class StructuralError : public Error {
public:
    using Error::Error;
};

// Invalid configuration: replay without markings, malformed simulator config, ...
class ConfigError : public Error {
public:
    using Error::Error;
};

// Precondition of an operation does not hold for the given input.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace pmkit
