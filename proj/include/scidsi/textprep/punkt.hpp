#pragma once

#include <json.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scidsi::textprep {

// Orthographic context bits recorded per word type.
enum OrthoFlag : std::uint32_t {
    kBegUpper = 1u << 1,
    kMidUpper = 1u << 2,
    kUnkUpper = 1u << 3,
    kBegLower = 1u << 4,
    kMidLower = 1u << 5,
    kUnkLower = 1u << 6,
    kAnyUpper = kBegUpper | kMidUpper | kUnkUpper,
    kAnyLower = kBegLower | kMidLower | kUnkLower,
};

/// Learned sentence-boundary parameters. Sets are ordered so serialization
/// is byte-stable. An empty state segments on punctuation alone.
struct SegmenterState {
    static constexpr int kFormatVersion = 1;

    std::set<std::string> abbreviation_set;
    std::set<std::pair<std::string, std::string>> collocation_set;
    std::set<std::string> sentence_starters;
    std::map<std::string, std::uint32_t> ortho_context;
    std::uint64_t training_token_count = 0;

    bool operator==(const SegmenterState&) const = default;
};

nlohmann::json to_json(const SegmenterState& state);
/// Throws SchemaError on a malformed or unknown-version snapshot.
SegmenterState segmenter_state_from_json(const nlohmann::json& j);

struct TrainingOptions {
    double abbrev_threshold = 0.3;
    double sent_starter_threshold = 30.0;
    double collocation_threshold = 7.88;
    // Types seen at least this often are never promoted as rare abbreviations.
    int abbrev_backoff = 5;
    int min_collocation_freq = 1;
};

/// Unsupervised training on a list of documents. Each text is treated as
/// starting a paragraph. Counts are aggregated over the whole list before
/// any decision, so the result does not depend on text order. Throws
/// EmptyCorpus when `texts` is empty.
SegmenterState train_segmenter(const std::vector<std::string>& texts, const TrainingOptions& options = {});

struct SentenceSpan {
    std::size_t start = 0;  // byte offset
    std::size_t end = 0;    // exclusive
    std::string text;

    bool operator==(const SentenceSpan&) const = default;
};

/// Splits after `.`, `?` or `!` (plus any attached closing brackets or
/// quotes) when the annotated token is a sentence break and the following
/// text begins, after optional opening brackets or quotes, with an uppercase
/// letter or digit. Spans are trimmed; whitespace between them is a gap.
std::vector<SentenceSpan> segment(std::string_view text, const SegmenterState& state);

struct SegmentedDocument {
    std::string text;  // title + separator + abstract
    std::vector<SentenceSpan> spans;
};

/// Joins title and abstract with ". " when the title lacks terminal
/// punctuation, otherwise with " ". The title (without the separator) is
/// always the first span; the abstract is segmented on its own.
SegmentedDocument segment_document(std::string_view title, std::string_view abstract,
                                   const SegmenterState& state);

std::string document_text(std::string_view title, std::string_view abstract);

}  // namespace scidsi::textprep
