#pragma once

#include "scidsi/corpus/filters.hpp"
#include "scidsi/corpus/record.hpp"
#include "scidsi/dsi/dsi.hpp"
#include "scidsi/embedding/embeddings.hpp"
#include "scidsi/stats/correlation.hpp"
#include "scidsi/textprep/segmenter_set.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace scidsi::pipeline {

struct CorpusSource {
    std::filesystem::path path;
    corpus::RecordFormat format = corpus::RecordFormat::Jsonl;
};

struct SegmenterSettings {
    textprep::SegmenterScope scope = textprep::SegmenterScope::PerSubject;
    std::size_t min_subject_docs = 50;
};

struct ProviderSettings {
    embedding::ProviderSpec spec;
    int max_attempts = 3;
    int timeout_seconds = 120;
    /// Name of an environment variable holding the sidecar shared secret.
    std::string secret_env;
};

struct DsiSettings {
    dsi::DsiMode mode = dsi::DsiMode::Pooled;
    dsi::Backend backend = dsi::Backend::Blocked;
};

struct SensitivitySettings {
    bool enabled = true;
    /// Author-count bins ("1", "3-5", "11+") or year ranges ("1994-1999").
    std::vector<std::string> bins;
    stats::CorrelationMethod method = stats::CorrelationMethod::Spearman;
};

struct ModelSettings {
    bool simple = true;
    bool full = true;
    std::string outcome = "cit5";  // cit3 | cit5 | cit_total
    bool standardize_simple = false;
    bool standardize_full = true;
};

struct PairwiseSettings {
    bool enabled = false;
    std::filesystem::path other_dsi;
    std::string label_a = "A";
    std::string label_b = "B";
};

struct AnalysisSelection {
    bool table1 = true;
    bool table2 = true;
    bool trend = true;
    bool boxplot = true;
    bool levene = true;
    bool qq = true;
    SensitivitySettings sensitivity_authors{true, {"1", "2", "3-5", "6-10", "11+"}};
    SensitivitySettings sensitivity_years{
        true, {"1994-1999", "2000-2005", "2006-2011", "2012-2017", "2018-2023", "2024-2025"}};
    ModelSettings models;
    PairwiseSettings pairwise;
};

struct PipelineConfig {
    CorpusSource corpus;
    std::filesystem::path field_map;
    std::filesystem::path vocab;
    corpus::EligibilityPolicy eligibility;
    bool drop_zero_authors = true;
    SegmenterSettings segmenter;
    ProviderSettings provider;
    DsiSettings dsi;
    AnalysisSelection analysis;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 0;
    unsigned jobs = 1;

    /// Throws ConfigError.
    void validate() const;
    dsi::DsiConfig dsi_config() const;
};

/// Directory holding field_map.v1.csv and vocab/. SCIDSI_DATA_DIR in the
/// environment wins over the build-time location.
std::filesystem::path default_data_dir();

/// Unknown keys anywhere raise ConfigError naming the dotted key path.
/// Relative paths resolve against `base_dir`.
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const PipelineConfig& config);

}  // namespace scidsi::pipeline
