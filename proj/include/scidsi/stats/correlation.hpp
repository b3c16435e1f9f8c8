#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace scidsi::stats {

enum class CorrelationMethod { Pearson, Spearman };

std::string_view to_string(CorrelationMethod method);
CorrelationMethod correlation_method_from_string(std::string_view name);

struct Correlation {
    double coefficient = 0.0;
    /// Two-tailed, from t = r*sqrt((n-2)/(1-r^2)) against t(n-2).
    double p_value = 1.0;
    std::size_t n = 0;
};

/// Product-moment correlation. Requires equal lengths, n >= 3 and
/// non-constant inputs (ConstantSeriesError otherwise).
Correlation pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of tie-averaged ranks.
Correlation spearman(std::span<const double> x, std::span<const double> y);

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

}  // namespace scidsi::stats
