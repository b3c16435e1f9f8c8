#include "scidsi/textprep/segmenter_set.hpp"

#include "scidsi/errors.hpp"

namespace scidsi::textprep {

SegmenterScope segmenter_scope_from_string(std::string_view name) {
    if (name == "per_subject") return SegmenterScope::PerSubject;
    if (name == "global") return SegmenterScope::Global;
    throw ConfigError("unknown segmenter scope: " + std::string(name));
}

std::string_view to_string(SegmenterScope scope) {
    return scope == SegmenterScope::PerSubject ? "per_subject" : "global";
}

const SegmenterState& SegmenterSet::for_subject(const std::string& subject) const {
    if (scope == SegmenterScope::PerSubject) {
        if (auto it = per_subject.find(subject); it != per_subject.end()) return it->second;
    }
    return global;
}

SegmenterSet train_segmenters(const std::vector<SubjectText>& docs, SegmenterScope scope,
                              std::size_t min_subject_docs, const TrainingOptions& options) {
    if (docs.empty()) throw EmptyCorpus("no documents to train segmenters on");
    SegmenterSet set;
    set.scope = scope;
    set.min_subject_docs = min_subject_docs;
    std::vector<std::string> all;
    std::map<std::string, std::vector<std::string>> by_subject;
    for (const auto& d : docs) {
        all.push_back(d.text);
        if (scope == SegmenterScope::PerSubject) by_subject[d.subject].push_back(d.text);
    }
    set.global = train_segmenter(all, options);
    for (const auto& [subject, texts] : by_subject) {
        if (texts.size() >= min_subject_docs) set.per_subject.emplace(subject, train_segmenter(texts, options));
    }
    return set;
}

nlohmann::json to_json(const SegmenterSet& set) {
    nlohmann::json subjects = nlohmann::json::object();
    for (const auto& [subject, state] : set.per_subject) subjects[subject] = to_json(state);
    return {{"scope", std::string(to_string(set.scope))},
            {"min_subject_docs", set.min_subject_docs},
            {"global", to_json(set.global)},
            {"per_subject", subjects}};
}

SegmenterSet segmenter_set_from_json(const nlohmann::json& j) {
    try {
        SegmenterSet set;
        set.scope = segmenter_scope_from_string(j.at("scope").get<std::string>());
        set.min_subject_docs = j.at("min_subject_docs").get<std::size_t>();
        set.global = segmenter_state_from_json(j.at("global"));
        for (const auto& [subject, state] : j.at("per_subject").items()) {
            set.per_subject.emplace(subject, segmenter_state_from_json(state));
        }
        return set;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("segmenter set: ") + e.what());
    }
}

}  // namespace scidsi::textprep
