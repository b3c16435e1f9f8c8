#include "scidsi/corpus/field_map.hpp"

#include "scidsi/errors.hpp"
#include "scidsi/util/csv.hpp"

#include <fstream>

namespace scidsi::corpus {

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

FieldMap FieldMap::load(std::istream& in) {
    if (!in) throw IoError("field map stream is not readable");
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header || header->fields.size() != 2 || header->fields[0] != "primary_subject" ||
        header->fields[1] != "field") {
        throw ParseError("field map header must be: primary_subject,field");
    }
    FieldMap map;
    while (auto row = reader.next()) {
        if (row->fields.size() == 1 && row->fields[0].empty()) continue;
        if (row->fields.size() != 2) {
            throw ParseError("field map line " + std::to_string(row->line) + ": expected 2 columns");
        }
        auto field = field_from_string(row->fields[1]);
        if (!field) {
            throw ParseError("field map line " + std::to_string(row->line) +
                             ": unknown field '" + row->fields[1] + "'");
        }
        auto key = normalize_whitespace(row->fields[0]);
        auto [it, inserted] = map.entries_.emplace(key, *field);
        if (!inserted && it->second != *field) {
            throw ParseError("field map line " + std::to_string(row->line) +
                             ": conflicting duplicate subject '" + key + "'");
        }
    }
    return map;
}

FieldMap FieldMap::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open field map: " + path.string());
    return load(in);
}

void FieldMap::insert(std::string_view subject, FieldOfResearch field) {
    entries_[normalize_whitespace(subject)] = field;
}

FieldOfResearch FieldMap::map(std::string_view subject) const {
    auto it = entries_.find(normalize_whitespace(subject));
    if (it == entries_.end()) throw UnmappedSubject("unmapped primary subject: " + std::string(subject));
    return it->second;
}

bool FieldMap::contains(std::string_view subject) const {
    return entries_.contains(normalize_whitespace(subject));
}

FieldOfResearch map_field(std::string_view subject, const FieldMap& map) { return map.map(subject); }

std::size_t assign_fields(std::vector<BiblioRecord>& records, const FieldMap& map) {
    std::size_t unmapped = 0;
    for (auto& r : records) {
        if (map.contains(r.primary_subject)) {
            r.field = map.map(r.primary_subject);
        } else {
            r.field.reset();
            ++unmapped;
        }
    }
    return unmapped;
}

}  // namespace scidsi::corpus
