#pragma once

#include "scidsi/stats/correlation.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scidsi::stats {

/// Closed interval [lo, hi]; an empty `hi` leaves the bin open-ended.
struct Bin {
    std::string label;
    double lo = 0.0;
    std::optional<double> hi;

    bool contains(double v) const { return v >= lo && (!hi || v <= *hi); }
};

/// Parses "3-5", "11+" or "2" into a bin labelled with the same text.
Bin parse_bin(const std::string& text);

struct Target {
    std::string label;
    /// Missing entries are excluded from that target's correlation only.
    std::vector<std::optional<double>> values;
};

struct CorrelationRow {
    std::string group;
    std::string target;
    std::size_t n = 0;
    /// Null when n < 3 or either side is constant within the bin.
    std::optional<double> coefficient;
    std::optional<double> p_value;
    CorrelationMethod method = CorrelationMethod::Spearman;
};

struct CorrelationReport {
    std::vector<CorrelationRow> rows;
    /// Observations whose grouping key fell outside every bin.
    std::size_t uncovered = 0;
};

/// One correlation of `value` against each target inside every bin of
/// `grouping_key`. Rows are ordered bin-major, target-minor.
CorrelationReport grouped_correlation(std::span<const double> value,
                                      std::span<const double> grouping_key,
                                      const std::vector<Target>& targets,
                                      const std::vector<Bin>& bins, CorrelationMethod method);

std::string to_csv(const CorrelationReport& report);

}  // namespace scidsi::stats
