#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scidsi::csv {

/// One logical RFC-4180 record and the physical line it started on (1-based).
struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

/// Streaming RFC-4180 reader. Quoted fields may contain commas, doubled
/// quotes and line breaks. A trailing CR before LF is stripped.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Returns std::nullopt at end of input. Throws ParseError on an
    /// unterminated quoted field.
    std::optional<Row> next();

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

}  // namespace scidsi::csv
