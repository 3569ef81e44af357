#pragma once

#include <set>
#include <string>
#include <string_view>

#include "qumin/ast.hpp"
#include "qumin/error.hpp"

namespace qumin {

class ParseError : public QuminError {
public:
    ParseError(std::string message, Span span, std::set<std::string> expected = {})
        : QuminError(ErrorCategory::Parse, std::move(message), span),
          expected_(std::move(expected)) {}

    const std::set<std::string>& expected() const { return expected_; }

private:
    std::set<std::string> expected_;
};

/// Raised by parse_expr when well-formed input is followed by junk.
class TrailingInput : public ParseError {
public:
    explicit TrailingInput(Span span)
        : ParseError("unexpected input after expression", span) {}
};

/// program <- expr*. Whitespace and // comments are skipped between tokens.
NodeList parse_program(std::string_view source);

/// Exactly one expression; anything left over raises TrailingInput.
NodePtr parse_expr(std::string_view source);

/// A bare type expression in the signature surface syntax.
AnnotationPtr parse_type_annotation(std::string_view source);

}  // namespace qumin
