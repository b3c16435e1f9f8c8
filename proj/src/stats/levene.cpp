#include "scidsi/stats/levene.hpp"

#include "scidsi/errors.hpp"
#include "scidsi/stats/descriptive.hpp"
#include "scidsi/stats/distributions.hpp"

#include <cmath>

namespace scidsi::stats {

LeveneResult levene(const std::vector<std::vector<double>>& groups, LeveneCenter center) {
    if (groups.size() < 2) throw PreconditionError("levene: need at least 2 groups");
    std::size_t total = 0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw PreconditionError("levene: every group needs n >= 2");
        require_finite(g, "levene");
        total += g.size();
    }
    const auto k = static_cast<double>(groups.size());
    const auto n = static_cast<double>(total);

    std::vector<std::vector<double>> deviations;
    deviations.reserve(groups.size());
    for (const auto& g : groups) {
        const double c = center == LeveneCenter::Mean ? mean(g) : median(g);
        std::vector<double> z;
        z.reserve(g.size());
        for (double v : g) z.push_back(std::fabs(v - c));
        deviations.push_back(std::move(z));
    }

    double grand = 0.0;
    for (const auto& z : deviations) {
        for (double v : z) grand += v;
    }
    grand /= n;

    double between = 0.0;
    double within = 0.0;
    for (const auto& z : deviations) {
        const double zm = mean(z);
        between += static_cast<double>(z.size()) * (zm - grand) * (zm - grand);
        for (double v : z) within += (v - zm) * (v - zm);
    }

    LeveneResult out;
    out.df_between = k - 1.0;
    out.df_within = n - k;
    if (within <= 0.0) return out;
    const double w = (out.df_within * between) / (out.df_between * within);
    out.statistic = w;
    out.p_value = f_sf(w, out.df_between, out.df_within);
    return out;
}

}  // namespace scidsi::stats
