#include "scidsi/pipeline/analysis.hpp"

#include "scidsi/errors.hpp"
#include "scidsi/stats/descriptive.hpp"
#include "scidsi/stats/transforms.hpp"
#include "scidsi/util/csv.hpp"
#include "scidsi/util/format.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace scidsi::pipeline {

using util::format_double;
using util::format_optional;

namespace {

std::string field_label(const corpus::BiblioRecord& r) {
    return r.field ? std::string(corpus::to_string(*r.field)) : std::string();
}

DistributionRow distribution(std::string group, std::vector<double> v) {
    DistributionRow row;
    row.group = std::move(group);
    row.n = v.size();
    if (v.empty()) return row;
    std::sort(v.begin(), v.end());
    row.min = v.front();
    row.max = v.back();
    row.range = v.back() - v.front();
    row.q1 = stats::quantile(v, 0.25);
    row.median = stats::median(v);
    row.q3 = stats::quantile(v, 0.75);
    row.mean = stats::mean(v);
    if (v.size() >= 2) row.sd = stats::sample_sd(v);
    return row;
}

std::string line(const std::vector<std::string>& fields) { return csv::join(fields) + "\n"; }

}  // namespace

std::vector<ScoredRecord> join_scores(const std::vector<corpus::BiblioRecord>& records,
                                      const std::vector<dsi::BatchRow>& rows) {
    std::unordered_map<std::string, const corpus::BiblioRecord*> by_id;
    for (const auto& r : records) by_id.emplace(r.record_id, &r);
    std::vector<ScoredRecord> out;
    for (const auto& row : rows) {
        const auto it = by_id.find(row.record_id);
        if (it == by_id.end()) throw IntegrityError("DSI row for unknown record id: " + row.record_id);
        if (row.score) out.push_back({it->second, row.score->value});
    }
    return out;
}

std::vector<DistributionRow> table2(const std::vector<ScoredRecord>& scored) {
    std::vector<DistributionRow> out;
    for (auto field : corpus::kAllFields) {
        std::vector<double> v;
        for (const auto& s : scored) {
            if (s.record->field == field) v.push_back(s.dsi);
        }
        out.push_back(distribution(std::string(corpus::to_string(field)), std::move(v)));
    }
    std::vector<double> all;
    for (const auto& s : scored) all.push_back(s.dsi);
    out.push_back(distribution("All", std::move(all)));
    return out;
}

std::string to_csv(const std::vector<DistributionRow>& rows) {
    std::string out = "field,n,min,q1,median,mean,q3,max,range,sd\n";
    for (const auto& r : rows) {
        out += line({r.group, std::to_string(r.n), format_optional(r.min), format_optional(r.q1),
                      format_optional(r.median), format_optional(r.mean), format_optional(r.q3),
                      format_optional(r.max), format_optional(r.range), format_optional(r.sd)});
    }
    return out;
}

std::vector<TrendRow> trend(const std::vector<ScoredRecord>& scored) {
    std::map<std::pair<std::string, int>, std::vector<double>> cells;
    for (const auto& s : scored) {
        if (s.record->field) cells[{field_label(*s.record), s.record->pub_year}].push_back(s.dsi);
        cells[{"All", s.record->pub_year}].push_back(s.dsi);
    }
    std::vector<TrendRow> out;
    for (auto& [key, v] : cells) {
        std::sort(v.begin(), v.end());
        TrendRow row;
        row.field = key.first;
        row.year = key.second;
        row.n = v.size();
        row.mean = stats::mean(v);
        if (v.size() >= 2) {
            row.sd = stats::sample_sd(v);
            const double half = 1.96 * *row.sd / std::sqrt(static_cast<double>(v.size()));
            row.ci_low = row.mean - half;
            row.ci_high = row.mean + half;
        }
        out.push_back(row);
    }
    return out;
}

std::string to_csv(const std::vector<TrendRow>& rows) {
    std::string out = "field,year,n,mean,sd,ci95_low,ci95_high\n";
    for (const auto& r : rows) {
        out += line({r.field, std::to_string(r.year), std::to_string(r.n), format_double(r.mean),
                      format_optional(r.sd), format_optional(r.ci_low), format_optional(r.ci_high)});
    }
    return out;
}

BoxplotData boxplot(const std::vector<ScoredRecord>& scored) {
    std::map<std::string, std::vector<const ScoredRecord*>> by_subject;
    for (const auto& s : scored) by_subject[s.record->primary_subject].push_back(&s);
    BoxplotData out;
    for (auto& [subject, members] : by_subject) {
        std::sort(members.begin(), members.end(), [](const ScoredRecord* a, const ScoredRecord* b) {
            return a->dsi != b->dsi ? a->dsi < b->dsi : a->record->record_id < b->record->record_id;
        });
        std::vector<double> v;
        for (const auto* m : members) v.push_back(m->dsi);
        BoxplotRow row;
        row.subject = subject;
        row.field = field_label(*members.front()->record);
        row.n = v.size();
        row.min = v.front();
        row.max = v.back();
        row.q1 = stats::quantile(v, 0.25);
        row.median = stats::median(v);
        row.q3 = stats::quantile(v, 0.75);
        const double iqr = row.q3 - row.q1;
        const double lo_fence = row.q1 - 1.5 * iqr;
        const double hi_fence = row.q3 + 1.5 * iqr;
        row.whisker_low = row.q1;
        row.whisker_high = row.q3;
        for (const auto* m : members) {
            if (m->dsi < lo_fence) {
                out.outliers.push_back({subject, m->record->record_id, m->dsi, "low"});
            } else if (m->dsi > hi_fence) {
                out.outliers.push_back({subject, m->record->record_id, m->dsi, "high"});
            } else {
                row.whisker_low = std::min(row.whisker_low, m->dsi);
                row.whisker_high = std::max(row.whisker_high, m->dsi);
            }
        }
        for (const auto& o : out.outliers) row.n_outliers += o.subject == subject;
        out.rows.push_back(row);
    }
    return out;
}

std::string to_csv(const std::vector<BoxplotRow>& rows) {
    std::string out = "subject,field,n,min,q1,median,q3,max,whisker_low,whisker_high,n_outliers\n";
    for (const auto& r : rows) {
        out += line({r.subject, r.field, std::to_string(r.n), format_double(r.min), format_double(r.q1),
                      format_double(r.median), format_double(r.q3), format_double(r.max),
                      format_double(r.whisker_low), format_double(r.whisker_high), std::to_string(r.n_outliers)});
    }
    return out;
}

std::string to_csv(const std::vector<Outlier>& rows) {
    std::string out = "subject,record_id,dsi,side\n";
    for (const auto& r : rows) out += line({r.subject, r.record_id, format_double(r.dsi), r.side});
    return out;
}

nlohmann::ordered_json levene_by_field(const std::vector<ScoredRecord>& scored) {
    nlohmann::ordered_json out;
    std::vector<std::vector<double>> groups;
    nlohmann::ordered_json members = nlohmann::ordered_json::array();
    for (auto field : corpus::kAllFields) {
        std::vector<double> v;
        for (const auto& s : scored) {
            if (s.record->field == field) v.push_back(s.dsi);
        }
        if (v.size() < 2) continue;
        std::sort(v.begin(), v.end());
        members.push_back({{"field", corpus::to_string(field)}, {"n", v.size()}, {"variance", stats::sample_variance(v)}});
        groups.push_back(std::move(v));
    }
    out["groups"] = members;
    if (groups.size() < 2) {
        out["error"] = "fewer than two fields with at least two scored documents";
        return out;
    }
    for (auto [name, center] : {std::pair{"mean", stats::LeveneCenter::Mean}, std::pair{"median", stats::LeveneCenter::Median}}) {
        const auto r = stats::levene(groups, center);
        out[name] = {{"statistic", r.statistic ? nlohmann::ordered_json(*r.statistic) : nlohmann::ordered_json()},
                     {"p_value", r.p_value ? nlohmann::ordered_json(*r.p_value) : nlohmann::ordered_json()},
                     {"df_between", r.df_between},
                     {"df_within", r.df_within}};
    }
    return out;
}

std::optional<double> window_value(const corpus::BiblioRecord& r, const std::string& window, int snapshot_year) {
    if (window == "cit3") {
        if (!r.cit3 || r.pub_year > snapshot_year - 4) return std::nullopt;
        return static_cast<double>(*r.cit3);
    }
    if (window == "cit5") {
        if (!r.cit5 || r.pub_year > snapshot_year - 6) return std::nullopt;
        return static_cast<double>(*r.cit5);
    }
    if (window == "cit_total") {
        if (!r.cit_total) return std::nullopt;
        return static_cast<double>(*r.cit_total);
    }
    throw ConfigError("unknown citation window: " + window);
}

namespace {

stats::CorrelationReport sensitivity(const std::vector<ScoredRecord>& scored, const SensitivitySettings& settings,
                                     int snapshot_year, bool by_year) {
    std::vector<stats::Bin> bins;
    for (const auto& b : settings.bins) bins.push_back(stats::parse_bin(b));
    std::vector<double> value, key;
    std::vector<stats::Target> targets;
    for (const auto& w : kCitationWindows) targets.push_back({w, {}});
    for (const auto& s : scored) {
        value.push_back(s.dsi);
        key.push_back(by_year ? s.record->pub_year : s.record->author_count);
        for (std::size_t t = 0; t < targets.size(); ++t) {
            targets[t].values.push_back(window_value(*s.record, kCitationWindows[t], snapshot_year));
        }
    }
    return stats::grouped_correlation(value, key, targets, bins, settings.method);
}

}  // namespace

stats::CorrelationReport sensitivity_by_authors(const std::vector<ScoredRecord>& scored,
                                                const SensitivitySettings& settings, int snapshot_year) {
    return sensitivity(scored, settings, snapshot_year, false);
}

stats::CorrelationReport sensitivity_by_years(const std::vector<ScoredRecord>& scored,
                                              const SensitivitySettings& settings, int snapshot_year) {
    return sensitivity(scored, settings, snapshot_year, true);
}

RegressionReport fit_model(const std::vector<ScoredRecord>& scored, ModelKind kind, const ModelSettings& settings,
                           int snapshot_year) {
    std::vector<double> y, raw, dsi_v, year, log_authors;
    std::vector<std::string> fields;
    for (const auto& s : scored) {
        const auto& r = *s.record;
        const auto outcome = window_value(r, settings.outcome, snapshot_year);
        if (!r.field || !outcome) continue;
        if (kind == ModelKind::Full && r.author_count <= 0) continue;
        raw.push_back(*outcome);
        y.push_back(stats::log10p1(*outcome));
        dsi_v.push_back(s.dsi);
        year.push_back(r.pub_year);
        log_authors.push_back(kind == ModelKind::Full ? std::log10(static_cast<double>(r.author_count)) : 0.0);
        fields.push_back(field_label(r));
    }
    RegressionReport report;
    report.kind = kind;
    report.outcome = settings.outcome;
    report.raw_outcome = raw;
    const std::string lhs = "log10(" + settings.outcome + " + 1) ~ ";
    const bool standardize = kind == ModelKind::Simple ? settings.standardize_simple : settings.standardize_full;
    auto column = [&](const std::string& name, const std::vector<double>& v) {
        if (!standardize) return v;
        report.standardized.push_back(name);
        return stats::standardize(v);
    };
    stats::DesignMatrixBuilder builder(y.size());
    if (kind == ModelKind::Simple) {
        report.formula = lhs + "DSI + C(Field)";
        builder.add_categorical("Field", fields);
        builder.add("DSI", column("DSI", dsi_v));
        report.fit = stats::ols_fit(builder.build(), y, stats::CovarianceType::Classic);
    } else {
        report.formula = lhs + "DSI + C(Field) + Pubyear + log10(AuthorCount)";
        builder.add_categorical("Field", fields);
        builder.add("DSI", column("DSI", dsi_v));
        builder.add("Pubyear", column("Pubyear", year));
        builder.add("log10(AuthorCount)", column("log10(AuthorCount)", log_authors));
        report.fit = stats::ols_fit(builder.build(), y, stats::CovarianceType::HC3);
    }
    return report;
}

nlohmann::ordered_json to_json(const RegressionReport& report) {
    const auto& f = report.fit;
    nlohmann::ordered_json j;
    j["model"] = report.kind == ModelKind::Simple ? "simple" : "full";
    j["formula"] = report.formula;
    j["outcome"] = report.outcome;
    j["cov_type"] = std::string(stats::to_string(f.cov_type));
    j["standardized"] = report.standardized;
    j["N"] = f.n;
    j["dof"] = f.dof;
    j["R2"] = f.r2;
    j["adj_R2"] = f.adj_r2;
    j["F"] = f.f_stat;
    j["F_p"] = f.f_p;
    j["F_classic"] = f.f_stat_classic;
    j["F_classic_p"] = f.f_p_classic;
    j["MSE"] = f.mse;
    j["JB"] = f.jarque_bera.statistic;
    j["JB_p"] = f.jarque_bera.p_value;
    j["skewness"] = f.jarque_bera.skewness;
    j["kurtosis"] = f.jarque_bera.kurtosis;
    auto coefficients = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < f.names.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        nlohmann::ordered_json c;
        c["name"] = f.names[k];
        c["beta"] = f.coefficients(i);
        c["se"] = f.se(k);
        c["se_classic"] = f.se_classic(i);
        c["se_hc3"] = f.se_hc3(i);
        c["t"] = f.t_stats(i);
        c["p"] = f.p_values(i);
        c["ci99_low"] = f.ci99[k].first;
        c["ci99_high"] = f.ci99[k].second;
        coefficients.push_back(std::move(c));
    }
    j["coefficients"] = coefficients;
    const double beta_dsi = f.coefficients(static_cast<Eigen::Index>(f.index_of("DSI")));
    const bool per_sd = std::find(report.standardized.begin(), report.standardized.end(), "DSI") != report.standardized.end();
    j["dsi_effect_percent"] = stats::effect_percent(beta_dsi);
    j["dsi_effect_basis"] = per_sd ? "per_sd" : "per_unit";
    return j;
}

std::string qq_csv(const std::vector<std::pair<std::string, std::vector<double>>>& series) {
    std::string out = "series,index,theoretical,sample\n";
    for (const auto& [name, values] : series) {
        if (values.size() < 3) continue;
        std::vector<stats::QqPoint> points;
        try {
            points = stats::qq_points(values);
        } catch (const ConstantSeriesError&) {
            continue;
        }
        for (std::size_t i = 0; i < points.size(); ++i) {
            out += line({name, std::to_string(i), format_double(points[i].theoretical), format_double(points[i].sample)});
        }
    }
    return out;
}

PairwiseReport pairwise(const std::vector<dsi::BatchRow>& a, const std::vector<dsi::BatchRow>& b) {
    std::unordered_map<std::string, double> other;
    for (const auto& r : b) {
        if (r.score) other.emplace(r.record_id, r.score->value);
    }
    PairwiseReport out;
    for (const auto& r : a) {
        if (!r.score) continue;
        const auto it = other.find(r.record_id);
        if (it == other.end()) continue;
        out.record_ids.push_back(r.record_id);
        out.a.push_back(r.score->value);
        out.b.push_back(it->second);
        if (it->second > r.score->value) {
            ++out.b_greater;
        } else if (it->second < r.score->value) {
            ++out.a_greater;
        } else {
            ++out.equal;
        }
    }
    out.pearson = stats::pearson(out.a, out.b);
    return out;
}

std::string to_csv(const PairwiseReport& report, const std::string& label_a, const std::string& label_b) {
    std::string out = csv::join({"record_id", "dsi_" + label_a, "dsi_" + label_b, "diff"}) + "\n";
    for (std::size_t i = 0; i < report.a.size(); ++i) {
        out += line({report.record_ids[i], format_double(report.a[i]), format_double(report.b[i]),
                      format_double(report.b[i] - report.a[i])});
    }
    return out;
}

nlohmann::ordered_json to_json(const PairwiseReport& report, const std::string& label_a, const std::string& label_b) {
    nlohmann::ordered_json j;
    j["label_a"] = label_a;
    j["label_b"] = label_b;
    j["n"] = report.a.size();
    j["pearson_r"] = report.pearson.coefficient;
    j["p_value"] = report.pearson.p_value;
    j["n_b_greater"] = report.b_greater;
    j["n_a_greater"] = report.a_greater;
    j["n_equal"] = report.equal;
    auto sorted_mean = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return stats::mean(v);
    };
    j["mean_a"] = sorted_mean(report.a);
    j["mean_b"] = sorted_mean(report.b);
    return j;
}

}  // namespace scidsi::pipeline
