#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace qumin {

/// Half-open byte range [begin, end) into the source text.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct LineCol {
    std::size_t line = 1;  // 1-based
    std::size_t col = 1;   // 1-based, in bytes
};

LineCol line_col_at(std::string_view source, std::size_t offset);

/// Renders "file:line:col: severity: message" for editor integration.
std::string format_diagnostic(std::string_view file, std::string_view source,
                              Span span, std::string_view severity,
                              std::string_view message);

}  // namespace qumin
