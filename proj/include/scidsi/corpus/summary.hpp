#pragma once

#include "scidsi/corpus/record.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace scidsi::corpus {

struct AuthorStats {
    std::optional<double> mean;
    std::optional<double> median;
    std::optional<double> max;
    std::optional<double> sd;
    std::size_t zeros = 0;
};

/// Statistics over the records where the window is present; `zeros_percent`
/// is relative to `n_present`.
struct CitationStats {
    std::size_t n_present = 0;
    std::optional<double> mean;
    std::optional<double> median;
    std::optional<double> sd;
    std::size_t zeros = 0;
    std::optional<double> zeros_percent;
};

struct SummaryRow {
    std::string field;  // enum spelling or "All"
    std::size_t n = 0;
    AuthorStats authors;
    std::array<CitationStats, 3> citations;  // cit3, cit5, cit_total
};

struct CorpusSummary {
    std::vector<SummaryRow> rows;  // one per field in enum order, then "All"
    std::size_t unmapped = 0;      // records without a field; counted in "All" only
};

/// Null statistics for empty groups; sd is null when fewer than 2 values.
CorpusSummary summarize(const std::vector<BiblioRecord>& records);

std::string to_csv(const CorpusSummary& summary);

}  // namespace scidsi::corpus
