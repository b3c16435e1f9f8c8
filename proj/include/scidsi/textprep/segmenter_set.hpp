#pragma once

#include "scidsi/textprep/punkt.hpp"

#include <map>
#include <string>
#include <vector>

namespace scidsi::textprep {

enum class SegmenterScope { PerSubject, Global };

SegmenterScope segmenter_scope_from_string(std::string_view name);
std::string_view to_string(SegmenterScope scope);

struct SubjectText {
    std::string subject;
    std::string text;
};

/// A global state plus per-subject states for subjects with enough
/// training documents. `for_subject` falls back to the global state.
struct SegmenterSet {
    SegmenterScope scope = SegmenterScope::PerSubject;
    std::size_t min_subject_docs = 50;
    SegmenterState global;
    std::map<std::string, SegmenterState> per_subject;

    const SegmenterState& for_subject(const std::string& subject) const;
};

SegmenterSet train_segmenters(const std::vector<SubjectText>& docs, SegmenterScope scope,
                              std::size_t min_subject_docs = 50, const TrainingOptions& options = {});

nlohmann::json to_json(const SegmenterSet& set);
SegmenterSet segmenter_set_from_json(const nlohmann::json& j);

}  // namespace scidsi::textprep
