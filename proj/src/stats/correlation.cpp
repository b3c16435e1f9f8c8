#include "scidsi/stats/correlation.hpp"

#include "scidsi/errors.hpp"
#include "scidsi/stats/descriptive.hpp"
#include "scidsi/stats/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace scidsi::stats {

std::string_view to_string(CorrelationMethod method) {
    return method == CorrelationMethod::Pearson ? "pearson" : "spearman";
}

CorrelationMethod correlation_method_from_string(std::string_view name) {
    if (name == "pearson") return CorrelationMethod::Pearson;
    if (name == "spearman") return CorrelationMethod::Spearman;
    throw DomainError("unknown correlation method: " + std::string(name));
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw PreconditionError("pearson: length mismatch");
    if (x.size() < 3) throw PreconditionError("pearson: n must be >= 3");
    require_finite(x, "pearson x");
    require_finite(y, "pearson y");

    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw ConstantSeriesError("pearson: constant input");

    Correlation out;
    out.n = x.size();
    out.coefficient = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double dof = static_cast<double>(out.n) - 2.0;
    const double r2 = out.coefficient * out.coefficient;
    if (dof <= 0.0) {
        out.p_value = 1.0;
    } else if (r2 >= 1.0) {
        out.p_value = 0.0;
    } else {
        // t^2 = dof * r^2 / (1 - r^2), so dof / (dof + t^2) = 1 - r^2.
        out.p_value = incomplete_beta(0.5 * dof, 0.5, 1.0 - r2);
    }
    return out;
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

Correlation spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw PreconditionError("spearman: length mismatch");
    require_finite(x, "spearman x");
    require_finite(y, "spearman y");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

}  // namespace scidsi::stats
