#pragma once

#include <span>

namespace scidsi::stats {

double mean(std::span<const double> values);

/// Sample variance with denominator n-1. Requires n >= 2.
double sample_variance(std::span<const double> values);
double sample_sd(std::span<const double> values);

/// Midpoint of the two central values for even n.
double median(std::span<const double> values);

/// Linear-interpolation quantile on the order statistics (position
/// (n-1)*q), the default of most statistical packages.
double quantile(std::span<const double> values, double q);

double min(std::span<const double> values);
double max(std::span<const double> values);

/// Throws DomainError naming `what` when any value is NaN or infinite.
void require_finite(std::span<const double> values, const char* what);

}  // namespace scidsi::stats
