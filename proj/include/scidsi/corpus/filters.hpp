#pragma once

#include "scidsi/corpus/record.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace scidsi::corpus {

struct EligibilityPolicy {
    int min_spaces = 199;
    int max_spaces = 299;
    int min_sentences = 3;
    bool require_subject_mapped = true;
    int snapshot_year = 2025;

    /// Throws PreconditionError.
    void validate() const;
};

/// Number of U+0020 characters; tabs, newlines and other spaces are ignored.
std::size_t count_spaces(std::string_view text);

struct Exclusion {
    BiblioRecord record;
    std::string reason;  // "space_count" | "unmapped_subject" | "zero_authors" | "too_few_sentences"
};

struct FilterResult {
    std::vector<BiblioRecord> kept;
    std::vector<Exclusion> excluded;
};

/// Space-count bounds are inclusive. Subject mapping is checked through the
/// `field` member, so records must have gone through assign_fields first.
FilterResult filter_eligible(std::vector<BiblioRecord> records, const EligibilityPolicy& policy);

/// Keeps pub_year <= snapshot_year - horizon_years - 1. Throws
/// PreconditionError when horizon_years < 1.
std::vector<BiblioRecord> window_eligible(const std::vector<BiblioRecord>& records, int horizon_years,
                                          int snapshot_year);

FilterResult drop_zero_authors(std::vector<BiblioRecord> records);

std::string exclusions_to_jsonl(const std::vector<Exclusion>& excluded);

}  // namespace scidsi::corpus
