#pragma once

#include "scidsi/corpus/record.hpp"

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace scidsi::corpus {

/// Subject -> field lookup. Keys are stored whitespace-normalized (trimmed,
/// inner runs collapsed to one space); matching is otherwise case-sensitive.
class FieldMap {
public:
    FieldMap() = default;

    /// Reads a `primary_subject,field` CSV. Throws ParseError on a bad header,
    /// unknown field name or conflicting duplicate subject.
    static FieldMap load(std::istream& in);
    static FieldMap load(const std::filesystem::path& path);

    void insert(std::string_view subject, FieldOfResearch field);

    /// Throws UnmappedSubject.
    FieldOfResearch map(std::string_view subject) const;
    bool contains(std::string_view subject) const;

    std::size_t size() const { return entries_.size(); }
    const std::map<std::string, FieldOfResearch>& entries() const { return entries_; }

private:
    std::map<std::string, FieldOfResearch> entries_;
};

std::string normalize_whitespace(std::string_view text);

FieldOfResearch map_field(std::string_view subject, const FieldMap& map);

/// Sets `field` on every record whose subject is mapped; returns the number
/// of records left unmapped.
std::size_t assign_fields(std::vector<BiblioRecord>& records, const FieldMap& map);

}  // namespace scidsi::corpus
