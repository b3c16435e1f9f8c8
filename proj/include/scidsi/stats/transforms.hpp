#pragma once

#include <span>
#include <utility>
#include <vector>

namespace scidsi::stats {

/// log10(x + 1). DomainError for x < 0.
double log10p1(double x);

/// (x - mean) / sd with the n-1 sample sd. ConstantSeriesError on zero variance.
std::vector<double> standardize(std::span<const double> values);

/// Percentage change in the untransformed outcome for a +1 unit (one SD for a
/// standardized regressor) move under a log10 outcome model: (10^beta - 1) * 100.
double effect_percent(double beta_per_sd);

struct JarqueBera {
    double statistic = 0.0;
    double p_value = 1.0;
    double skewness = 0.0;
    /// Non-excess kurtosis (3 for a normal sample).
    double kurtosis = 0.0;
};

/// JB = n/6 * (S^2 + (K-3)^2/4) using central-moment skewness and kurtosis;
/// p from chi-square with 2 dof. Requires n >= 8.
JarqueBera jarque_bera(std::span<const double> residuals);

struct QqPoint {
    double theoretical = 0.0;
    double sample = 0.0;
};

/// Ordered standardized residuals against standard-normal quantiles at
/// plotting positions (i - 0.5)/n. Requires n >= 3.
std::vector<QqPoint> qq_points(std::span<const double> residuals);

}  // namespace scidsi::stats
