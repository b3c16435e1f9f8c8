#include "scidsi/corpus/filters.hpp"

#include "scidsi/errors.hpp"

#include <algorithm>

namespace scidsi::corpus {

void EligibilityPolicy::validate() const {
    if (min_spaces < 0) throw PreconditionError("min_spaces must be non-negative");
    if (min_spaces > max_spaces) throw PreconditionError("min_spaces must not exceed max_spaces");
    if (min_sentences < 2) throw PreconditionError("min_sentences must be at least 2");
}

std::size_t count_spaces(std::string_view text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), ' '));
}

FilterResult filter_eligible(std::vector<BiblioRecord> records, const EligibilityPolicy& policy) {
    policy.validate();
    FilterResult out;
    for (auto& r : records) {
        const auto spaces = count_spaces(r.abstract);
        if (spaces < static_cast<std::size_t>(policy.min_spaces) ||
            spaces > static_cast<std::size_t>(policy.max_spaces)) {
            out.excluded.push_back({std::move(r), "space_count"});
        } else if (policy.require_subject_mapped && !r.field) {
            out.excluded.push_back({std::move(r), "unmapped_subject"});
        } else {
            out.kept.push_back(std::move(r));
        }
    }
    return out;
}

std::vector<BiblioRecord> window_eligible(const std::vector<BiblioRecord>& records, int horizon_years,
                                          int snapshot_year) {
    if (horizon_years < 1) throw PreconditionError("horizon_years must be at least 1");
    const int last_year = snapshot_year - horizon_years - 1;
    std::vector<BiblioRecord> out;
    for (const auto& r : records) {
        if (r.pub_year <= last_year) out.push_back(r);
    }
    return out;
}

FilterResult drop_zero_authors(std::vector<BiblioRecord> records) {
    FilterResult out;
    for (auto& r : records) {
        if (r.author_count == 0) {
            out.excluded.push_back({std::move(r), "zero_authors"});
        } else {
            out.kept.push_back(std::move(r));
        }
    }
    return out;
}

std::string exclusions_to_jsonl(const std::vector<Exclusion>& excluded) {
    std::string out;
    for (const auto& e : excluded) {
        nlohmann::json obj{{"id", e.record.record_id}, {"reason", e.reason}};
        out += obj.dump();
        out.push_back('\n');
    }
    return out;
}

}  // namespace scidsi::corpus
