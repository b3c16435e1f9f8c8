#include "scidsi/stats/descriptive.hpp"

#include "scidsi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace scidsi::stats {

namespace {

void require_nonempty(std::span<const double> values, const char* what) {
    if (values.empty()) throw PreconditionError(std::string(what) + ": empty series");
}

}  // namespace

double mean(std::span<const double> values) {
    require_nonempty(values, "mean");
    // Two-pass mean: the correction term absorbs most rounding of the first pass.
    double sum = 0.0;
    for (double v : values) sum += v;
    const double first = sum / static_cast<double>(values.size());
    double correction = 0.0;
    for (double v : values) correction += v - first;
    return first + correction / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
    if (values.size() < 2) throw PreconditionError("sample variance needs n >= 2");
    const double m = mean(values);
    double ss = 0.0;
    double comp = 0.0;
    for (double v : values) {
        const double d = v - m;
        ss += d * d;
        comp += d;
    }
    const auto n = static_cast<double>(values.size());
    return (ss - comp * comp / n) / (n - 1.0);
}

double sample_sd(std::span<const double> values) { return std::sqrt(sample_variance(values)); }

double median(std::span<const double> values) { return quantile(values, 0.5); }

double quantile(std::span<const double> values, double q) {
    require_nonempty(values, "quantile");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level outside [0,1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double position = q * static_cast<double>(sorted.size() - 1);
    const auto lower = static_cast<std::size_t>(std::floor(position));
    const std::size_t upper = std::min(lower + 1, sorted.size() - 1);
    const double frac = position - static_cast<double>(lower);
    if (frac == 0.0) return sorted[lower];
    return sorted[lower] + (sorted[upper] - sorted[lower]) * frac;
}

double min(std::span<const double> values) {
    require_nonempty(values, "min");
    return *std::min_element(values.begin(), values.end());
}

double max(std::span<const double> values) {
    require_nonempty(values, "max");
    return *std::max_element(values.begin(), values.end());
}

void require_finite(std::span<const double> values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw DomainError(std::string(what) + ": non-finite value at index " +
                              std::to_string(i));
        }
    }
}

}  // namespace scidsi::stats
