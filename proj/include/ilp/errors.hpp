#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ilp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax or validation failure in an input file. `line`/`column` are 1-based;
/// 0 means the problem is not tied to a position (e.g. a missing file).
class ParseError : public Error {
public:
    ParseError(std::string file, std::size_t line, std::size_t column, const std::string& message)
        : Error(format(file, line, column, message)),
          file_(std::move(file)), line_(line), column_(column), message_(message) {}

    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    static std::string format(const std::string& file, std::size_t line, std::size_t column,
                              const std::string& message) {
        std::string out = file.empty() ? std::string("<input>") : file;
        if (line > 0) out += ":" + std::to_string(line) + ":" + std::to_string(column);
        return out + ": " + message;
    }

    std::string file_;
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

/// A rule whose head variable does not occur in its body.
class UnsafeRuleError : public Error {
public:
    UnsafeRuleError(const std::string& rule, const std::string& variable)
        : Error("unsafe rule `" + rule + "`: head variable " + variable + " does not occur in the body"),
          variable_(variable) {}

    const std::string& variable() const { return variable_; }

private:
    std::string variable_;
};

/// Exhaustive enumeration refused because it would exceed the configured ceiling.
class CeilingExceeded : public Error {
public:
    CeilingExceeded(double estimate, double ceiling)
        : Error("refusing exhaustive enumeration: estimated " + std::to_string(static_cast<long long>(estimate)) +
                " candidates exceeds ceiling " + std::to_string(static_cast<long long>(ceiling))),
          estimate_(estimate), ceiling_(ceiling) {}

    double estimate() const { return estimate_; }
    double ceiling() const { return ceiling_; }

private:
    double estimate_;
    double ceiling_;
};

/// An internal consistency check failed (e.g. the pruning audit found a violation).
class InvariantBreach : public Error {
public:
    using Error::Error;
};

}  // namespace ilp
