#include "qumin/span.hpp"

#include <sstream>

namespace qumin {

LineCol line_col_at(std::string_view source, std::size_t offset) {
    if (offset > source.size()) offset = source.size();
    LineCol lc;
    for (std::size_t i = 0; i < offset; ++i) {
        if (source[i] == '\n') {
            ++lc.line;
            lc.col = 1;
        } else {
            ++lc.col;
        }
    }
    return lc;
}

std::string format_diagnostic(std::string_view file, std::string_view source,
                              Span span, std::string_view severity,
                              std::string_view message) {
    LineCol lc = line_col_at(source, span.begin);
    std::ostringstream out;
    out << file << ':' << lc.line << ':' << lc.col << ": " << severity << ": " << message;
    return out.str();
}

}  // namespace qumin
