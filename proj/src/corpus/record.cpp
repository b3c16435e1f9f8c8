#include "scidsi/corpus/record.hpp"

#include "scidsi/errors.hpp"
#include "scidsi/util/csv.hpp"
#include "scidsi/util/unicode.hpp"

#include <charconv>
#include <map>
#include <unordered_set>

namespace scidsi::corpus {

namespace {

using nlohmann::json;

struct FieldNames {
    FieldOfResearch field;
    std::string_view key;
    std::string_view label;
};

constexpr std::array<FieldNames, 5> kFieldNames = {{
    {FieldOfResearch::LifeSciBiomed, "LifeSciBiomed", "Life Sciences & Biomedicine"},
    {FieldOfResearch::Multidisciplinary, "Multidisciplinary", "Multidisciplinary Sciences"},
    {FieldOfResearch::PhysicalSci, "PhysicalSci", "Physical Sciences"},
    {FieldOfResearch::SocialSci, "SocialSci", "Social Sciences"},
    {FieldOfResearch::Technology, "Technology", "Technology"},
}};

constexpr std::array<std::string_view, 10> kColumns = {
    "id", "doi", "title", "abstract", "pub_year", "author_count", "primary_subject",
    "cit3", "cit5", "cit_total"};

/// Raised inside the per-line parsers; becomes a Reject.
struct LineViolation {
    std::string reason;
};

std::string required_text(const std::optional<std::string>& value, std::string_view key) {
    if (!value || value->empty()) throw LineViolation{"missing required field: " + std::string(key)};
    if (!unicode::valid_utf8(*value)) throw LineViolation{"invalid UTF-8 in field: " + std::string(key)};
    return unicode::nfc(*value);
}

std::optional<std::int64_t> parse_integer(std::string_view text, std::string_view key) {
    if (text.empty()) return std::nullopt;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw LineViolation{"invalid integer in field: " + std::string(key)};
    }
    return v;
}

void validate(BiblioRecord& r) {
    if (r.author_count < 0) throw LineViolation{"negative author_count"};
    for (const auto& [v, key] : {std::pair{r.cit3, "cit3"}, std::pair{r.cit5, "cit5"},
                                 std::pair{r.cit_total, "cit_total"}}) {
        if (v && *v < 0) throw LineViolation{"negative citation count: " + std::string(key)};
    }
    if (r.cit3 && r.cit5 && r.cit_total && !(*r.cit3 <= *r.cit5 && *r.cit5 <= *r.cit_total)) {
        throw LineViolation{"citation windows not monotone (cit3 <= cit5 <= cit_total)"};
    }
}

BiblioRecord from_values(const std::map<std::string_view, std::optional<std::string>>& text,
                         const std::map<std::string_view, std::optional<std::int64_t>>& ints) {
    BiblioRecord r;
    r.record_id = required_text(text.at("id"), "id");
    r.title = required_text(text.at("title"), "title");
    r.abstract = required_text(text.at("abstract"), "abstract");
    r.primary_subject = required_text(text.at("primary_subject"), "primary_subject");
    if (const auto& doi = text.at("doi"); doi && !doi->empty()) {
        if (!unicode::valid_utf8(*doi)) throw LineViolation{"invalid UTF-8 in field: doi"};
        r.doi = *doi;
    }
    const auto year = ints.at("pub_year");
    if (!year) throw LineViolation{"missing required field: pub_year"};
    const auto authors = ints.at("author_count");
    if (!authors) throw LineViolation{"missing required field: author_count"};
    if (*year < -9999 || *year > 9999) throw LineViolation{"pub_year out of range"};
    if (*authors > 1'000'000) throw LineViolation{"author_count out of range"};
    r.pub_year = static_cast<int>(*year);
    r.author_count = static_cast<int>(*authors);
    r.cit3 = ints.at("cit3");
    r.cit5 = ints.at("cit5");
    r.cit_total = ints.at("cit_total");
    validate(r);
    return r;
}

BiblioRecord parse_json_line(const std::string& line) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error&) {
        throw LineViolation{"malformed JSON"};
    }
    if (!obj.is_object()) throw LineViolation{"record is not a JSON object"};

    std::map<std::string_view, std::optional<std::string>> text;
    for (std::string_view key : {"id", "doi", "title", "abstract", "primary_subject"}) {
        auto it = obj.find(std::string(key));
        if (it == obj.end() || it->is_null()) {
            text[key] = std::nullopt;
        } else if (it->is_string()) {
            text[key] = it->get<std::string>();
        } else {
            throw LineViolation{"invalid field type: " + std::string(key)};
        }
    }
    std::map<std::string_view, std::optional<std::int64_t>> ints;
    for (std::string_view key : {"pub_year", "author_count", "cit3", "cit5", "cit_total"}) {
        auto it = obj.find(std::string(key));
        if (it == obj.end() || it->is_null()) {
            ints[key] = std::nullopt;
        } else if (it->is_number_integer()) {
            ints[key] = it->get<std::int64_t>();
        } else {
            throw LineViolation{"invalid field type: " + std::string(key)};
        }
    }
    return from_values(text, ints);
}

}  // namespace

std::string_view to_string(FieldOfResearch field) {
    for (const auto& f : kFieldNames) {
        if (f.field == field) return f.key;
    }
    return "unknown";
}

std::string_view display_name(FieldOfResearch field) {
    for (const auto& f : kFieldNames) {
        if (f.field == field) return f.label;
    }
    return "unknown";
}

std::optional<FieldOfResearch> field_from_string(std::string_view name) {
    for (const auto& f : kFieldNames) {
        if (f.key == name) return f.field;
    }
    return std::nullopt;
}

RecordFormat record_format_from_string(std::string_view name) {
    if (name == "jsonl") return RecordFormat::Jsonl;
    if (name == "csv") return RecordFormat::Csv;
    throw ConfigError("unknown record format: " + std::string(name));
}

ParseResult parse_records(std::istream& in, RecordFormat format) {
    if (!in) throw IoError("record stream is not readable");
    ParseResult result;
    std::unordered_set<std::string> seen;

    auto accept = [&](std::size_t line, BiblioRecord record) {
        if (!seen.insert(record.record_id).second) {
            result.rejects.push_back({line, "duplicate id: " + record.record_id});
            return;
        }
        result.records.push_back(std::move(record));
    };

    if (format == RecordFormat::Jsonl) {
        std::string line;
        std::size_t number = 0;
        while (std::getline(in, line)) {
            ++number;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            try {
                accept(number, parse_json_line(line));
            } catch (const LineViolation& v) {
                result.rejects.push_back({number, v.reason});
            }
        }
        if (in.bad()) throw IoError("read failure in record stream");
        return result;
    }

    csv::Reader reader(in);
    std::optional<csv::Row> header;
    try {
        header = reader.next();
    } catch (const ParseError& e) {
        throw ParseError(std::string("CSV header: ") + e.what());
    }
    if (!header) return result;
    if (!header->fields.empty() && header->fields[0].starts_with("\xEF\xBB\xBF")) {
        header->fields[0].erase(0, 3);
    }
    std::map<std::string_view, std::size_t> column;
    for (std::size_t i = 0; i < header->fields.size(); ++i) {
        for (auto key : kColumns) {
            if (header->fields[i] == key) column[key] = i;
        }
    }
    for (auto key : {"id", "title", "abstract", "pub_year", "author_count", "primary_subject"}) {
        if (!column.contains(key)) throw ParseError("CSV header lacks required column: " + std::string(key));
    }

    for (;;) {
        std::optional<csv::Row> row;
        try {
            row = reader.next();
        } catch (const ParseError& e) {
            result.rejects.push_back({0, e.what()});
            break;
        }
        if (!row) break;
        if (row->fields.size() == 1 && row->fields[0].empty()) continue;
        try {
            if (row->fields.size() != header->fields.size()) {
                throw LineViolation{"expected " + std::to_string(header->fields.size()) +
                                    " columns, found " + std::to_string(row->fields.size())};
            }
            std::map<std::string_view, std::optional<std::string>> text;
            std::map<std::string_view, std::optional<std::int64_t>> ints;
            for (auto key : {"id", "doi", "title", "abstract", "primary_subject"}) {
                auto it = column.find(key);
                text[key] = it == column.end() ? std::nullopt
                                               : std::optional<std::string>(row->fields[it->second]);
            }
            for (auto key : {"pub_year", "author_count", "cit3", "cit5", "cit_total"}) {
                auto it = column.find(key);
                ints[key] = it == column.end() ? std::nullopt
                                               : parse_integer(row->fields[it->second], key);
            }
            accept(row->line, from_values(text, ints));
        } catch (const LineViolation& v) {
            result.rejects.push_back({row->line, v.reason});
        }
    }
    if (in.bad()) throw IoError("read failure in record stream");
    return result;
}

nlohmann::json to_json(const BiblioRecord& r) {
    json obj = json::object();
    obj["id"] = r.record_id;
    obj["doi"] = r.doi ? json(*r.doi) : json(nullptr);
    obj["title"] = r.title;
    obj["abstract"] = r.abstract;
    obj["pub_year"] = r.pub_year;
    obj["author_count"] = r.author_count;
    obj["primary_subject"] = r.primary_subject;
    obj["cit3"] = r.cit3 ? json(*r.cit3) : json(nullptr);
    obj["cit5"] = r.cit5 ? json(*r.cit5) : json(nullptr);
    obj["cit_total"] = r.cit_total ? json(*r.cit_total) : json(nullptr);
    if (r.field) obj["field"] = std::string(to_string(*r.field));
    return obj;
}

std::string to_jsonl(const std::vector<BiblioRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += to_json(r).dump();
        out.push_back('\n');
    }
    return out;
}

std::string rejects_to_jsonl(const std::vector<Reject>& rejects) {
    std::string out;
    for (const auto& r : rejects) {
        out += json{{"line", r.line}, {"reason", r.reason}}.dump();
        out.push_back('\n');
    }
    return out;
}

}  // namespace scidsi::corpus
