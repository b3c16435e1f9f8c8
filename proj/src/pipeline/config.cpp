#include "scidsi/pipeline/config.hpp"

#include "scidsi/errors.hpp"
#include "scidsi/stats/grouped.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#ifndef SCIDSI_DEFAULT_DATA_DIR
#define SCIDSI_DEFAULT_DATA_DIR "data"
#endif

namespace scidsi::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Hands out members of one JSON object and complains about leftovers.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError("config section '" + label() + "' must be an object");
    }

    ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, value] : j_.items()) {
            if (!used_.contains(key)) throw ConfigError("unknown config key: " + qualified(key));
        }
    }

    const json* find(const std::string& key) {
        used_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    template <typename T>
    void read(const std::string& key, T& out) {
        if (const json* v = find(key)) {
            try {
                out = v->get<T>();
            } catch (const json::exception&) {
                throw ConfigError("config key " + qualified(key) + " has the wrong type");
            }
        }
    }

    void read_path(const std::string& key, fs::path& out, const fs::path& base) {
        std::string text;
        if (const json* v = find(key)) {
            if (!v->is_string()) throw ConfigError("config key " + qualified(key) + " must be a string");
            text = v->get<std::string>();
            out = text.empty() ? fs::path() : resolve(text, base);
        }
    }

    std::string child(const std::string& key) const { return qualified(key); }

    static fs::path resolve(const fs::path& p, const fs::path& base) {
        return p.is_absolute() || base.empty() ? p : base / p;
    }

private:
    std::string label() const { return path_.empty() ? "<root>" : path_; }
    std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

template <typename F>
void with_section(Section& parent, const std::string& key, F&& body) {
    if (const json* v = parent.find(key)) {
        Section s(*v, parent.child(key));
        body(s);
    }
}

std::string read_string(Section& s, const std::string& key, const std::string& fallback) {
    std::string out = fallback;
    s.read(key, out);
    return out;
}

void read_sensitivity(Section& s, SensitivitySettings& out) {
    s.read("enabled", out.enabled);
    s.read("bins", out.bins);
    out.method = stats::correlation_method_from_string(read_string(s, "method", std::string(to_string(out.method))));
}

json sensitivity_json(const SensitivitySettings& s) {
    return {{"enabled", s.enabled}, {"bins", s.bins}, {"method", std::string(to_string(s.method))}};
}

std::string format_name(corpus::RecordFormat f) { return f == corpus::RecordFormat::Jsonl ? "jsonl" : "csv"; }

}  // namespace

fs::path default_data_dir() {
    if (const char* env = std::getenv("SCIDSI_DATA_DIR"); env && *env) return env;
    return SCIDSI_DEFAULT_DATA_DIR;
}

void PipelineConfig::validate() const {
    if (corpus.path.empty()) throw ConfigError("corpus.path is required");
    try {
        eligibility.validate();
        provider.spec.validate();
        dsi_config().validate();
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    if (segmenter.min_subject_docs < 1) throw ConfigError("segmenter.min_subject_docs must be >= 1");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (provider.max_attempts < 1) throw ConfigError("provider.max_attempts must be >= 1");
    if (provider.timeout_seconds < 1) throw ConfigError("provider.timeout_seconds must be >= 1");
    if (provider.spec.kind != embedding::ProviderKind::Synthetic && provider.spec.endpoint_or_path.empty()) {
        throw ConfigError("provider.endpoint_or_path is required for provider kind " +
                          std::string(to_string(provider.spec.kind)));
    }
    if (provider.spec.kind == embedding::ProviderKind::Synthetic && provider.spec.hidden_dim < 1) {
        throw ConfigError("provider.hidden_dim must be set for the synthetic provider");
    }
    const auto& m = analysis.models.outcome;
    if (m != "cit3" && m != "cit5" && m != "cit_total") {
        throw ConfigError("analysis.models.outcome must be cit3, cit5 or cit_total");
    }
    for (const auto* s : {&analysis.sensitivity_authors, &analysis.sensitivity_years}) {
        if (s->enabled && s->bins.empty()) throw ConfigError("sensitivity bins must not be empty when enabled");
        for (const auto& b : s->bins) stats::parse_bin(b);
    }
    if (analysis.pairwise.enabled && analysis.pairwise.other_dsi.empty()) {
        throw ConfigError("analysis.pairwise.other_dsi is required when pairwise is enabled");
    }
}

dsi::DsiConfig PipelineConfig::dsi_config() const {
    dsi::DsiConfig c;
    c.mode = dsi.mode;
    c.layer_indices = provider.spec.layer_indices;
    c.min_sentences = eligibility.min_sentences;
    return c;
}

PipelineConfig config_from_json(const json& j, const fs::path& base_dir) {
    PipelineConfig c;
    c.field_map = default_data_dir() / "field_map.v1.csv";
    c.vocab = default_data_dir() / "vocab" / "cased_fixture_vocab.txt";
    try {
        Section root(j, "");
        with_section(root, "corpus", [&](Section& s) {
            s.read_path("path", c.corpus.path, base_dir);
            c.corpus.format = corpus::record_format_from_string(read_string(s, "format", "jsonl"));
        });
        root.read_path("field_map", c.field_map, base_dir);
        root.read_path("vocab", c.vocab, base_dir);
        with_section(root, "eligibility", [&](Section& s) {
            s.read("min_spaces", c.eligibility.min_spaces);
            s.read("max_spaces", c.eligibility.max_spaces);
            s.read("min_sentences", c.eligibility.min_sentences);
            s.read("require_subject_mapped", c.eligibility.require_subject_mapped);
            s.read("snapshot_year", c.eligibility.snapshot_year);
            s.read("drop_zero_authors", c.drop_zero_authors);
        });
        with_section(root, "segmenter", [&](Section& s) {
            c.segmenter.scope = textprep::segmenter_scope_from_string(read_string(s, "scope", "per_subject"));
            s.read("min_subject_docs", c.segmenter.min_subject_docs);
        });
        root.read("seed", c.seed);
        with_section(root, "provider", [&](Section& s) {
            auto& spec = c.provider.spec;
            spec.kind = embedding::provider_kind_from_string(read_string(s, "kind", "synthetic"));
            s.read("model_id", spec.model_id);
            s.read("layers", spec.layer_indices);
            s.read("hidden_dim", spec.hidden_dim);
            if (spec.kind == embedding::ProviderKind::Cache) {
                fs::path p;
                s.read_path("endpoint_or_path", p, base_dir);
                spec.endpoint_or_path = p.string();
            } else {
                s.read("endpoint_or_path", spec.endpoint_or_path);
            }
            s.read("max_attempts", c.provider.max_attempts);
            s.read("timeout_seconds", c.provider.timeout_seconds);
            s.read("secret_env", c.provider.secret_env);
        });
        with_section(root, "dsi", [&](Section& s) {
            c.dsi.mode = dsi::dsi_mode_from_string(read_string(s, "mode", "pooled"));
            c.dsi.backend = dsi::backend_from_string(read_string(s, "backend", "blocked"));
        });
        with_section(root, "analysis", [&](Section& s) {
            auto& a = c.analysis;
            for (auto [key, flag] : {std::pair{"table1", &a.table1}, std::pair{"table2", &a.table2},
                                     std::pair{"trend", &a.trend}, std::pair{"boxplot", &a.boxplot},
                                     std::pair{"levene", &a.levene}, std::pair{"qq", &a.qq}}) {
                s.read(key, *flag);
            }
            with_section(s, "sensitivity_authors", [&](Section& t) { read_sensitivity(t, a.sensitivity_authors); });
            with_section(s, "sensitivity_years", [&](Section& t) { read_sensitivity(t, a.sensitivity_years); });
            with_section(s, "models", [&](Section& t) {
                t.read("simple", a.models.simple);
                t.read("full", a.models.full);
                t.read("outcome", a.models.outcome);
                t.read("standardize_simple", a.models.standardize_simple);
                t.read("standardize_full", a.models.standardize_full);
            });
            with_section(s, "pairwise", [&](Section& t) {
                t.read("enabled", a.pairwise.enabled);
                t.read_path("other_dsi", a.pairwise.other_dsi, base_dir);
                t.read("label_a", a.pairwise.label_a);
                t.read("label_b", a.pairwise.label_b);
            });
        });
        root.read_path("output_dir", c.output_dir, base_dir);
        root.read("jobs", c.jobs);
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    c.provider.spec.seed = c.seed;
    c.validate();
    return c;
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j, fs::absolute(path).parent_path());
}

nlohmann::ordered_json to_json(const PipelineConfig& c) {
    const auto& spec = c.provider.spec;
    const auto& a = c.analysis;
    nlohmann::ordered_json j;
    j["corpus"] = {{"path", c.corpus.path.string()}, {"format", format_name(c.corpus.format)}};
    j["field_map"] = c.field_map.string();
    j["vocab"] = c.vocab.string();
    j["eligibility"] = {{"min_spaces", c.eligibility.min_spaces},
                        {"max_spaces", c.eligibility.max_spaces},
                        {"min_sentences", c.eligibility.min_sentences},
                        {"require_subject_mapped", c.eligibility.require_subject_mapped},
                        {"snapshot_year", c.eligibility.snapshot_year},
                        {"drop_zero_authors", c.drop_zero_authors}};
    j["segmenter"] = {{"scope", std::string(to_string(c.segmenter.scope))},
                      {"min_subject_docs", c.segmenter.min_subject_docs}};
    j["provider"] = {{"kind", std::string(to_string(spec.kind))},
                     {"model_id", spec.model_id},
                     {"layers", spec.layer_indices},
                     {"hidden_dim", spec.hidden_dim},
                     {"endpoint_or_path", spec.endpoint_or_path},
                     {"max_attempts", c.provider.max_attempts},
                     {"timeout_seconds", c.provider.timeout_seconds},
                     {"secret_env", c.provider.secret_env}};
    j["dsi"] = {{"mode", std::string(to_string(c.dsi.mode))}, {"backend", std::string(to_string(c.dsi.backend))}};
    nlohmann::ordered_json analysis;
    analysis["table1"] = a.table1;
    analysis["table2"] = a.table2;
    analysis["trend"] = a.trend;
    analysis["boxplot"] = a.boxplot;
    analysis["levene"] = a.levene;
    analysis["qq"] = a.qq;
    analysis["sensitivity_authors"] = sensitivity_json(a.sensitivity_authors);
    analysis["sensitivity_years"] = sensitivity_json(a.sensitivity_years);
    analysis["models"] = {{"simple", a.models.simple},
                          {"full", a.models.full},
                          {"outcome", a.models.outcome},
                          {"standardize_simple", a.models.standardize_simple},
                          {"standardize_full", a.models.standardize_full}};
    analysis["pairwise"] = {{"enabled", a.pairwise.enabled},
                            {"other_dsi", a.pairwise.other_dsi.string()},
                            {"label_a", a.pairwise.label_a},
                            {"label_b", a.pairwise.label_b}};
    j["analysis"] = analysis;
    j["output_dir"] = c.output_dir.string();
    j["seed"] = c.seed;
    j["jobs"] = c.jobs;
    return j;
}

}  // namespace scidsi::pipeline
