#pragma once

#include <stdexcept>
#include <string>

#include "qumin/span.hpp"

namespace qumin {

/// Coarse failure class; the CLI maps each to a distinct exit code.
enum class ErrorCategory {
    Parse,       // exit 1
    TypeCheck,   // exit 2
    Constraint,  // exit 3
    Runtime,     // exit 4
    Io,          // exit 5
};

class QuminError : public std::runtime_error {
public:
    QuminError(ErrorCategory category, std::string message, Span span = {})
        : std::runtime_error(std::move(message)), category_(category), span_(span) {}

    ErrorCategory category() const { return category_; }
    Span span() const { return span_; }

private:
    ErrorCategory category_;
    Span span_;
};

class IoError : public QuminError {
public:
    explicit IoError(std::string message)
        : QuminError(ErrorCategory::Io, std::move(message)) {}
};

}  // namespace qumin
