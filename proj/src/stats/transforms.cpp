#include "scidsi/stats/transforms.hpp"

#include "scidsi/errors.hpp"
#include "scidsi/stats/descriptive.hpp"
#include "scidsi/stats/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace scidsi::stats {

double log10p1(double x) {
    if (!(x >= 0.0)) throw DomainError("log10p1 of negative value " + std::to_string(x));
    return std::log10(x + 1.0);
}

std::vector<double> standardize(std::span<const double> values) {
    require_finite(values, "standardize");
    if (values.size() < 2) throw ConstantSeriesError("standardize: need n >= 2");
    const double m = mean(values);
    const double sd = sample_sd(values);
    if (!(sd > 0.0)) throw ConstantSeriesError("standardize: zero variance");
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back((v - m) / sd);
    return out;
}

double effect_percent(double beta_per_sd) { return (std::pow(10.0, beta_per_sd) - 1.0) * 100.0; }

JarqueBera jarque_bera(std::span<const double> residuals) {
    if (residuals.size() < 8) throw PreconditionError("jarque_bera: n must be >= 8");
    require_finite(residuals, "jarque_bera");
    const auto n = static_cast<double>(residuals.size());
    const double m = mean(residuals);
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double r : residuals) {
        const double d = r - m;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) throw ConstantSeriesError("jarque_bera: zero variance");

    JarqueBera out;
    out.skewness = m3 / std::pow(m2, 1.5);
    out.kurtosis = m4 / (m2 * m2);
    const double excess = out.kurtosis - 3.0;
    out.statistic = n / 6.0 * (out.skewness * out.skewness + excess * excess / 4.0);
    out.p_value = chisq_sf(out.statistic, 2.0);
    return out;
}

std::vector<QqPoint> qq_points(std::span<const double> residuals) {
    if (residuals.size() < 3) throw PreconditionError("qq_points: n must be >= 3");
    const auto standardized = standardize(residuals);
    std::vector<double> ordered(standardized.begin(), standardized.end());
    std::sort(ordered.begin(), ordered.end());
    const auto n = static_cast<double>(ordered.size());
    std::vector<QqPoint> out;
    out.reserve(ordered.size());
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const double position = (static_cast<double>(i) + 0.5) / n;
        out.push_back({normal_quantile(position), ordered[i]});
    }
    return out;
}

}  // namespace scidsi::stats
