#pragma once

#include <json.hpp>

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scidsi::corpus {

enum class FieldOfResearch { LifeSciBiomed, Multidisciplinary, PhysicalSci, SocialSci, Technology };

inline constexpr std::array<FieldOfResearch, 5> kAllFields = {
    FieldOfResearch::LifeSciBiomed, FieldOfResearch::Multidisciplinary,
    FieldOfResearch::PhysicalSci, FieldOfResearch::SocialSci, FieldOfResearch::Technology};

/// Enum spelling used in data files ("LifeSciBiomed", ...).
std::string_view to_string(FieldOfResearch field);
/// Human-readable label ("Life Sciences & Biomedicine", ...).
std::string_view display_name(FieldOfResearch field);
std::optional<FieldOfResearch> field_from_string(std::string_view name);

struct BiblioRecord {
    std::string record_id;
    std::optional<std::string> doi;
    std::string title;
    std::string abstract;
    int pub_year = 0;
    int author_count = 0;
    std::string primary_subject;
    std::optional<FieldOfResearch> field;
    std::optional<std::int64_t> cit3;
    std::optional<std::int64_t> cit5;
    std::optional<std::int64_t> cit_total;

    bool operator==(const BiblioRecord&) const = default;
};

enum class RecordFormat { Jsonl, Csv };

RecordFormat record_format_from_string(std::string_view name);

struct Reject {
    std::size_t line = 0;
    std::string reason;
};

struct ParseResult {
    std::vector<BiblioRecord> records;
    std::vector<Reject> rejects;
};

/// Reads line-delimited records. Schema violations (missing or mistyped
/// fields, negative counts, cit3 <= cit5 <= cit_total broken, duplicate ids,
/// invalid UTF-8) go to `rejects` with their 1-based line number; text
/// fields are NFC-normalized. Throws IoError when the stream is unreadable.
ParseResult parse_records(std::istream& in, RecordFormat format);

/// Canonical JSON object using the ingest key names (plus "field" when set).
nlohmann::json to_json(const BiblioRecord& record);
std::string to_jsonl(const std::vector<BiblioRecord>& records);
std::string rejects_to_jsonl(const std::vector<Reject>& rejects);

}  // namespace scidsi::corpus
