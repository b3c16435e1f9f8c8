#pragma once

#include "scidsi/corpus/record.hpp"
#include "scidsi/embedding/embeddings.hpp"
#include "scidsi/pipeline/config.hpp"
#include "scidsi/pipeline/manifest.hpp"
#include "scidsi/textprep/wordpiece.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace scidsi::pipeline {

// File names inside the output directory.
namespace files {
inline constexpr const char* kCorpus = "corpus.jsonl";
inline constexpr const char* kRejects = "rejects.jsonl";
inline constexpr const char* kExclusions = "exclusions.jsonl";
inline constexpr const char* kTable1 = "table1.csv";
inline constexpr const char* kSegmenter = "segmenter.json";
inline constexpr const char* kSentences = "sentences.jsonl";
inline constexpr const char* kSegmentExclusions = "segment_exclusions.jsonl";
inline constexpr const char* kEmbeddings = "embeddings.dsic";
inline constexpr const char* kDsi = "dsi.csv";
inline constexpr const char* kCompareCsv = "compare_backends.csv";
inline constexpr const char* kCompareJson = "compare_backends.json";
inline constexpr const char* kCompareTiming = "compare_timing.csv";
}  // namespace files

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitThreshold = 3 };

/// Maps library errors onto the command-line exit codes.
int exit_code_for(const std::exception& e);

struct StageContext {
    PipelineConfig config;
    std::ostream* log = nullptr;

    const std::filesystem::path& out_dir() const { return config.output_dir; }
};

struct SegmentedRecord {
    std::string record_id;
    std::string subject;
    std::vector<std::string> sentences;
};

/// Corpus written by ingest, with fields re-assigned from the field map.
std::vector<corpus::BiblioRecord> load_stage_corpus(const PipelineConfig& config);
std::vector<SegmentedRecord> load_sentences(const std::filesystem::path& path);

std::unique_ptr<embedding::EmbeddingProvider> make_provider(const PipelineConfig& config);

/// Stage runners. Each updates manifest.json in the output directory and
/// returns its record. run_dsi marks the record "aborted" (rows written so
/// far are kept) when the provider fails for good.
StageRecord run_ingest(StageContext& ctx);
StageRecord run_train_segmenter(StageContext& ctx);
StageRecord run_segment(StageContext& ctx);
StageRecord run_embed(StageContext& ctx);
StageRecord run_dsi(StageContext& ctx);
StageRecord run_analyze(StageContext& ctx);

struct CompareOutcome {
    StageRecord record;
    double max_abs_diff = 0.0;
    double threshold = 0.0;
    bool passed = true;
};

/// Scores every segmented document on the reference and blocked paths.
/// `sentinel_offset` perturbs the blocked path to prove the check can fail.
CompareOutcome run_compare_backends(StageContext& ctx, double sentinel_offset = 0.0);

}  // namespace scidsi::pipeline
