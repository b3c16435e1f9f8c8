#pragma once

#include "scidsi/corpus/field_map.hpp"
#include "scidsi/corpus/record.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace scidsi::pipeline {

/// Words available to the generator; each is a single word piece in the
/// shipped vocabulary fixture.
std::span<const char* const> synthetic_words();

struct SynthOptions {
    std::size_t n_records = 1000;
    std::uint64_t seed = 0;
    int first_year = 1994;
    int last_year = 2024;
    /// Share of records given a subject missing from the field map.
    double unmapped_rate = 0.01;
    double zero_author_rate = 0.005;
    /// Abstract space counts are drawn uniformly from this range, so some
    /// land outside the default eligibility bounds.
    int min_spaces = 170;
    int max_spaces = 320;
};

/// Deterministic for a given seed on every platform (integer hashing only).
std::vector<corpus::BiblioRecord> synthetic_corpus(const corpus::FieldMap& map, const SynthOptions& options);

}  // namespace scidsi::pipeline
