#pragma once

#include "scidsi/corpus/record.hpp"
#include "scidsi/dsi/batch.hpp"
#include "scidsi/pipeline/config.hpp"
#include "scidsi/stats/grouped.hpp"
#include "scidsi/stats/levene.hpp"
#include "scidsi/stats/ols.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace scidsi::pipeline {

/// One scored document joined with its bibliographic record.
struct ScoredRecord {
    const corpus::BiblioRecord* record = nullptr;
    double dsi = 0.0;
};

/// Joins DSI rows onto records by id, skipping rows without a score.
/// Throws IntegrityError for ids absent from the corpus.
std::vector<ScoredRecord> join_scores(const std::vector<corpus::BiblioRecord>& records,
                                      const std::vector<dsi::BatchRow>& rows);

struct DistributionRow {
    std::string group;
    std::size_t n = 0;
    std::optional<double> min, q1, median, mean, q3, max, range, sd;
};

/// Per field (enum order) then "All". Records without a field only count in "All".
std::vector<DistributionRow> table2(const std::vector<ScoredRecord>& scored);
std::string to_csv(const std::vector<DistributionRow>& rows);

struct TrendRow {
    std::string field;
    int year = 0;
    std::size_t n = 0;
    double mean = 0.0;
    std::optional<double> sd;
    /// mean -/+ 1.96 sd / sqrt(n); null for n < 2.
    std::optional<double> ci_low, ci_high;
};

/// Per (field, year) cells plus an "All" series, sorted by field then year.
std::vector<TrendRow> trend(const std::vector<ScoredRecord>& scored);
std::string to_csv(const std::vector<TrendRow>& rows);

struct BoxplotRow {
    std::string subject;
    std::string field;
    std::size_t n = 0;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    /// Most extreme observations inside [q1 - 1.5 IQR, q3 + 1.5 IQR].
    double whisker_low = 0, whisker_high = 0;
    std::size_t n_outliers = 0;
};

struct Outlier {
    std::string subject;
    std::string record_id;
    double dsi = 0.0;
    std::string side;  // "low" | "high"
};

struct BoxplotData {
    std::vector<BoxplotRow> rows;  // sorted by subject
    std::vector<Outlier> outliers;  // by subject, then dsi, then id
};

BoxplotData boxplot(const std::vector<ScoredRecord>& scored);
std::string to_csv(const std::vector<BoxplotRow>& rows);
std::string to_csv(const std::vector<Outlier>& rows);

/// Levene across fields with at least two scored documents.
nlohmann::ordered_json levene_by_field(const std::vector<ScoredRecord>& scored);

/// Citation window value, or empty when missing or when the window had not
/// closed by the snapshot year (cit3 needs pub_year <= snapshot - 4, cit5
/// pub_year <= snapshot - 6; cit_total is always usable).
std::optional<double> window_value(const corpus::BiblioRecord& r, const std::string& window, int snapshot_year);

inline const std::vector<std::string> kCitationWindows = {"cit3", "cit5", "cit_total"};

stats::CorrelationReport sensitivity_by_authors(const std::vector<ScoredRecord>& scored,
                                                const SensitivitySettings& settings, int snapshot_year);
stats::CorrelationReport sensitivity_by_years(const std::vector<ScoredRecord>& scored,
                                              const SensitivitySettings& settings, int snapshot_year);

enum class ModelKind { Simple, Full };

struct RegressionReport {
    ModelKind kind = ModelKind::Simple;
    std::string formula;
    std::string outcome;
    std::vector<std::string> standardized;
    stats::RegressionResult fit;
    /// Raw outcome values of the fitted sample (for QQ data).
    std::vector<double> raw_outcome;
};

/// Simple: log10(outcome + 1) ~ DSI + C(Field) with classic errors. Full:
/// adds Pubyear + log10(AuthorCount), HC3 errors. Both samples keep mapped
/// records whose outcome window has closed; the full model also needs a
/// positive author count.
RegressionReport fit_model(const std::vector<ScoredRecord>& scored, ModelKind kind, const ModelSettings& settings,
                           int snapshot_year);
nlohmann::ordered_json to_json(const RegressionReport& report);

/// series,index,theoretical,sample rows for each named series.
std::string qq_csv(const std::vector<std::pair<std::string, std::vector<double>>>& series);

struct PairwiseReport {
    std::vector<std::string> record_ids;
    std::vector<double> a, b;
    stats::Correlation pearson;
    std::size_t b_greater = 0, a_greater = 0, equal = 0;
};

/// Matches the two tables on record_id (rows with scores in both).
PairwiseReport pairwise(const std::vector<dsi::BatchRow>& a, const std::vector<dsi::BatchRow>& b);
std::string to_csv(const PairwiseReport& report, const std::string& label_a, const std::string& label_b);
nlohmann::ordered_json to_json(const PairwiseReport& report, const std::string& label_a, const std::string& label_b);

}  // namespace scidsi::pipeline
