#include "scidsi/stats/grouped.hpp"

#include "scidsi/errors.hpp"
#include "scidsi/util/csv.hpp"
#include "scidsi/util/format.hpp"

#include <charconv>

namespace scidsi::stats {

namespace {

double parse_number(const std::string& text, const std::string& whole) {
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) throw ConfigError("invalid bin specification: " + whole);
    return v;
}

}  // namespace

Bin parse_bin(const std::string& text) {
    Bin bin;
    bin.label = text;
    if (!text.empty() && text.back() == '+') {
        bin.lo = parse_number(text.substr(0, text.size() - 1), text);
        return bin;
    }
    const auto dash = text.find('-', 1);
    if (dash == std::string::npos) {
        bin.lo = parse_number(text, text);
        bin.hi = bin.lo;
    } else {
        bin.lo = parse_number(text.substr(0, dash), text);
        bin.hi = parse_number(text.substr(dash + 1), text);
        if (*bin.hi < bin.lo) throw ConfigError("bin upper bound below lower bound: " + text);
    }
    return bin;
}

CorrelationReport grouped_correlation(std::span<const double> value,
                                      std::span<const double> grouping_key,
                                      const std::vector<Target>& targets,
                                      const std::vector<Bin>& bins, CorrelationMethod method) {
    if (bins.empty()) throw PreconditionError("grouped_correlation: empty grouping");
    if (value.size() != grouping_key.size()) {
        throw PreconditionError("grouped_correlation: value/grouping length mismatch");
    }
    for (const auto& t : targets) {
        if (t.values.size() != value.size()) {
            throw PreconditionError("grouped_correlation: target '" + t.label + "' length mismatch");
        }
    }

    CorrelationReport report;
    std::vector<int> membership(value.size(), -1);
    for (std::size_t i = 0; i < value.size(); ++i) {
        for (std::size_t b = 0; b < bins.size(); ++b) {
            if (bins[b].contains(grouping_key[i])) {
                membership[i] = static_cast<int>(b);
                break;
            }
        }
        if (membership[i] < 0) ++report.uncovered;
    }

    for (std::size_t b = 0; b < bins.size(); ++b) {
        for (const auto& target : targets) {
            std::vector<double> xs;
            std::vector<double> ys;
            for (std::size_t i = 0; i < value.size(); ++i) {
                if (membership[i] != static_cast<int>(b) || !target.values[i]) continue;
                xs.push_back(value[i]);
                ys.push_back(*target.values[i]);
            }
            CorrelationRow row;
            row.group = bins[b].label;
            row.target = target.label;
            row.n = xs.size();
            row.method = method;
            if (xs.size() >= 3) {
                try {
                    const auto c = method == CorrelationMethod::Pearson ? pearson(xs, ys)
                                                                        : spearman(xs, ys);
                    row.coefficient = c.coefficient;
                    row.p_value = c.p_value;
                } catch (const ConstantSeriesError&) {
                }
            }
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

std::string to_csv(const CorrelationReport& report) {
    std::string out = "group,target,n,coefficient,p_value,method\n";
    for (const auto& row : report.rows) {
        out += csv::join({row.group, row.target, std::to_string(row.n),
                          util::format_optional(row.coefficient),
                          util::format_optional(row.p_value), std::string(to_string(row.method))});
        out.push_back('\n');
    }
    return out;
}

}  // namespace scidsi::stats
