#pragma once

#include <optional>
#include <span>
#include <vector>

namespace scidsi::stats {

enum class LeveneCenter { Mean, Median };

struct LeveneResult {
    /// Empty when every absolute deviation equals its group mean (W undefined).
    std::optional<double> statistic;
    std::optional<double> p_value;
    double df_between = 0.0;
    double df_within = 0.0;
};

/// Levene's test for equal variances. Mean centering is the classic form;
/// Median centering is the Brown-Forsythe variant. Requires >= 2 groups of
/// n >= 2 each.
LeveneResult levene(const std::vector<std::vector<double>>& groups,
                    LeveneCenter center = LeveneCenter::Mean);

}  // namespace scidsi::stats
