#include "scidsi/util/csv.hpp"

#include "scidsi/errors.hpp"

namespace scidsi::csv {

std::optional<Row> Reader::next() {
    std::string physical;
    if (!std::getline(in_, physical)) return std::nullopt;
    ++line_;

    Row row;
    row.line = line_;
    std::string field;
    bool quoted = false;
    bool field_was_quoted = false;

    for (;;) {
        if (!quoted && !physical.empty() && physical.back() == '\r') physical.pop_back();
        for (std::size_t i = 0; i < physical.size(); ++i) {
            const char c = physical[i];
            if (quoted) {
                if (c == '"') {
                    if (i + 1 < physical.size() && physical[i + 1] == '"') {
                        field.push_back('"');
                        ++i;
                    } else {
                        quoted = false;
                    }
                } else {
                    field.push_back(c);
                }
            } else if (c == '"' && field.empty() && !field_was_quoted) {
                quoted = true;
                field_was_quoted = true;
            } else if (c == ',') {
                row.fields.push_back(std::move(field));
                field.clear();
                field_was_quoted = false;
            } else {
                field.push_back(c);
            }
        }
        if (!quoted) break;
        // Quoted field spans a line break.
        if (!std::getline(in_, physical)) {
            throw ParseError("unterminated quoted field starting on line " +
                             std::to_string(row.line));
        }
        ++line_;
        field.push_back('\n');
    }
    row.fields.push_back(std::move(field));
    return row;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(fields[i]);
    }
    return out;
}

}  // namespace scidsi::csv
