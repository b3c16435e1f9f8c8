#include "scidsi/pipeline/stages.hpp"

#include "scidsi/corpus/field_map.hpp"
#include "scidsi/corpus/filters.hpp"
#include "scidsi/corpus/summary.hpp"
#include "scidsi/dsi/batch.hpp"
#include "scidsi/embedding/cache.hpp"
#include "scidsi/embedding/sidecar.hpp"
#include "scidsi/embedding/synthetic.hpp"
#include "scidsi/errors.hpp"
#include "scidsi/pipeline/analysis.hpp"
#include "scidsi/textprep/punkt.hpp"
#include "scidsi/textprep/segmenter_set.hpp"
#include "scidsi/util/csv.hpp"
#include "scidsi/util/format.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace scidsi::pipeline {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::ostream& log_of(const StageContext& ctx) { return ctx.log ? *ctx.log : std::cerr; }

// Loads the manifest, stamps the config, and saves after the stage body.
class ManifestScope {
public:
    explicit ManifestScope(const StageContext& ctx)
        : out_(ctx.out_dir()), manifest_((fs::create_directories(out_), RunManifest::load_or_create(out_))) {
        manifest_.set_config(to_json(ctx.config));
    }

    RunManifest& manifest() { return manifest_; }

    void write(const std::string& relative, std::string_view contents) {
        const auto path = out_ / relative;
        fs::create_directories(path.parent_path());
        util::write_file_atomic(path, contents);
        manifest_.record_output(relative);
    }

    void finish(const StageRecord& record) {
        manifest_.record_stage(record);
        manifest_.save();
    }

private:
    fs::path out_;
    RunManifest manifest_;
};

fs::path require_file(const fs::path& path, const std::string& produced_by) {
    if (!fs::exists(path)) {
        throw IoError("missing " + path.string() + (produced_by.empty() ? "" : " (run '" + produced_by + "' first)"));
    }
    return path;
}

corpus::FieldMap load_field_map(const PipelineConfig& config) { return corpus::FieldMap::load(config.field_map); }

std::vector<dsi::BatchDocument> tokenize_documents(const std::vector<SegmentedRecord>& docs,
                                                   const textprep::Vocabulary& vocab, std::size_t& dropped) {
    std::vector<dsi::BatchDocument> out;
    out.reserve(docs.size());
    for (const auto& d : docs) {
        dsi::BatchDocument b{d.record_id, {}};
        for (const auto& s : d.sentences) {
            try {
                b.sentences.push_back(textprep::tokenize(s, vocab));
            } catch (const EmptySentence&) {
                ++dropped;
            }
        }
        out.push_back(std::move(b));
    }
    return out;
}

std::string exclusion_lines(const std::vector<std::pair<std::string, std::string>>& rows) {
    std::string out;
    for (const auto& [id, reason] : rows) {
        nlohmann::ordered_json j;
        j["id"] = id;
        j["reason"] = reason;
        out += j.dump() + "\n";
    }
    return out;
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const PreconditionError*>(&e)) return kExitUsage;
    return kExitData;
}

std::vector<corpus::BiblioRecord> load_stage_corpus(const PipelineConfig& config) {
    const auto path = require_file(config.output_dir / files::kCorpus, "ingest");
    std::ifstream in(path);
    auto parsed = corpus::parse_records(in, corpus::RecordFormat::Jsonl);
    if (!parsed.rejects.empty()) {
        throw IntegrityError(path.string() + " line " + std::to_string(parsed.rejects.front().line) + ": " +
                             parsed.rejects.front().reason);
    }
    corpus::assign_fields(parsed.records, load_field_map(config));
    return std::move(parsed.records);
}

std::vector<SegmentedRecord> load_sentences(const fs::path& path) {
    std::ifstream in(require_file(path, "segment"));
    std::vector<SegmentedRecord> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            SegmentedRecord r;
            r.record_id = j.at("id").get<std::string>();
            r.subject = j.at("subject").get<std::string>();
            for (const auto& s : j.at("sentences")) r.sentences.push_back(s.at("text").get<std::string>());
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw IntegrityError(path.string() + " line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

std::unique_ptr<embedding::EmbeddingProvider> make_provider(const PipelineConfig& config) {
    const auto& spec = config.provider.spec;
    switch (spec.kind) {
        case embedding::ProviderKind::Synthetic:
            return std::make_unique<embedding::SyntheticProvider>(spec);
        case embedding::ProviderKind::Cache:
            return std::make_unique<embedding::CacheProvider>(spec);
        case embedding::ProviderKind::Sidecar: {
            embedding::SidecarOptions options;
            options.max_attempts = config.provider.max_attempts;
            options.read_timeout = std::chrono::seconds(config.provider.timeout_seconds);
            if (!config.provider.secret_env.empty()) {
                const char* secret = std::getenv(config.provider.secret_env.c_str());
                if (!secret) throw ConfigError("environment variable " + config.provider.secret_env + " is not set");
                options.shared_secret = secret;
            }
            return std::make_unique<embedding::SidecarProvider>(spec, options);
        }
    }
    throw ConfigError("unsupported provider kind");
}

StageRecord run_ingest(StageContext& ctx) {
    const auto t0 = Clock::now();
    const auto& cfg = ctx.config;
    ManifestScope scope(ctx);
    std::ifstream in(cfg.corpus.path, std::ios::binary);
    if (!in) throw IoError("cannot read corpus " + cfg.corpus.path.string());
    scope.manifest().record_input("corpus", cfg.corpus.path);
    scope.manifest().record_input("field_map", cfg.field_map);

    auto parsed = corpus::parse_records(in, cfg.corpus.format);
    StageRecord rec{"ingest", {}, 0.0, "ok", ""};
    rec.counts["parsed"] = parsed.records.size();
    rec.counts["rejected"] = parsed.rejects.size();
    if (!parsed.rejects.empty()) {
        log_of(ctx) << "warning: " << parsed.rejects.size() << " malformed record(s), see " << files::kRejects << "\n";
    }
    corpus::assign_fields(parsed.records, load_field_map(cfg));

    std::vector<corpus::Exclusion> excluded;
    std::vector<corpus::BiblioRecord> records = std::move(parsed.records);
    if (cfg.drop_zero_authors) {
        auto dropped = corpus::drop_zero_authors(std::move(records));
        records = std::move(dropped.kept);
        rec.counts["zero_authors"] = dropped.excluded.size();
        excluded = std::move(dropped.excluded);
    }
    auto filtered = corpus::filter_eligible(std::move(records), cfg.eligibility);
    for (auto& e : filtered.excluded) {
        ++rec.counts["excluded_" + e.reason];
        excluded.push_back(std::move(e));
    }
    rec.counts["kept"] = filtered.kept.size();

    scope.write(files::kCorpus, corpus::to_jsonl(filtered.kept));
    scope.write(files::kRejects, corpus::rejects_to_jsonl(parsed.rejects));
    scope.write(files::kExclusions, corpus::exclusions_to_jsonl(excluded));
    if (cfg.analysis.table1) scope.write(files::kTable1, corpus::to_csv(corpus::summarize(filtered.kept)));
    rec.seconds = seconds_since(t0);
    scope.finish(rec);
    return rec;
}

StageRecord run_train_segmenter(StageContext& ctx) {
    const auto t0 = Clock::now();
    ManifestScope scope(ctx);
    const auto records = load_stage_corpus(ctx.config);
    std::vector<textprep::SubjectText> texts;
    texts.reserve(records.size());
    for (const auto& r : records) texts.push_back({r.primary_subject, r.abstract});
    const auto set = textprep::train_segmenters(texts, ctx.config.segmenter.scope, ctx.config.segmenter.min_subject_docs);
    scope.write(files::kSegmenter, textprep::to_json(set).dump(1) + "\n");
    StageRecord rec{"train-segmenter", {}, 0.0, "ok", ""};
    rec.counts["documents"] = records.size();
    rec.counts["subject_states"] = set.per_subject.size();
    rec.counts["global_abbreviations"] = set.global.abbreviation_set.size();
    rec.seconds = seconds_since(t0);
    scope.finish(rec);
    return rec;
}

StageRecord run_segment(StageContext& ctx) {
    const auto t0 = Clock::now();
    ManifestScope scope(ctx);
    const auto records = load_stage_corpus(ctx.config);
    std::ifstream sin(require_file(ctx.out_dir() / files::kSegmenter, "train-segmenter"));
    const auto set = textprep::segmenter_set_from_json(nlohmann::json::parse(sin));

    std::string sentences;
    std::vector<std::pair<std::string, std::string>> excluded;
    StageRecord rec{"segment", {{"documents", 0}}, 0.0, "ok", ""};
    std::size_t total_sentences = 0;
    for (const auto& r : records) {
        const auto doc = textprep::segment_document(r.title, r.abstract, set.for_subject(r.primary_subject));
        if (doc.spans.size() < static_cast<std::size_t>(ctx.config.eligibility.min_sentences)) {
            excluded.emplace_back(r.record_id, "too_few_sentences");
            continue;
        }
        nlohmann::ordered_json j;
        j["id"] = r.record_id;
        j["subject"] = r.primary_subject;
        j["sentences"] = nlohmann::ordered_json::array();
        for (const auto& s : doc.spans) j["sentences"].push_back({{"start", s.start}, {"end", s.end}, {"text", s.text}});
        sentences += j.dump() + "\n";
        total_sentences += doc.spans.size();
        ++rec.counts["documents"];
    }
    rec.counts["excluded_too_few_sentences"] = excluded.size();
    rec.counts["sentences"] = total_sentences;
    scope.write(files::kSentences, sentences);
    scope.write(files::kSegmentExclusions, exclusion_lines(excluded));
    rec.seconds = seconds_since(t0);
    scope.finish(rec);
    return rec;
}

StageRecord run_embed(StageContext& ctx) {
    const auto t0 = Clock::now();
    const auto& cfg = ctx.config;
    if (cfg.provider.spec.kind == embedding::ProviderKind::Cache) {
        throw ConfigError("embed needs a synthetic or sidecar provider; the configured provider is already a cache");
    }
    ManifestScope scope(ctx);
    const auto docs = load_sentences(ctx.out_dir() / files::kSentences);
    const auto vocab = textprep::Vocabulary::load(cfg.vocab);
    scope.manifest().record_input("vocab", cfg.vocab);
    std::size_t dropped = 0;
    const auto batch = tokenize_documents(docs, vocab, dropped);
    auto provider = make_provider(cfg);

    const auto path = ctx.out_dir() / files::kEmbeddings;
    embedding::CacheWriter writer(path, cfg.provider.spec.model_id, cfg.provider.spec.layer_indices, provider->hidden_dim());
    std::size_t sentences = 0;
    for (const auto& d : batch) {
        writer.add(d.record_id, embedding::embed_document(*provider, d.record_id, d.sentences));
        sentences += d.sentences.size();
    }
    writer.finish();
    scope.manifest().record_output(files::kEmbeddings);
    StageRecord rec{"embed", {}, 0.0, "ok", ""};
    rec.counts["documents"] = batch.size();
    rec.counts["sentences"] = sentences;
    rec.counts["empty_sentences_dropped"] = dropped;
    rec.counts["hidden_dim"] = static_cast<std::size_t>(provider->hidden_dim());
    rec.seconds = seconds_since(t0);
    scope.finish(rec);
    return rec;
}

StageRecord run_dsi(StageContext& ctx) {
    const auto t0 = Clock::now();
    const auto& cfg = ctx.config;
    ManifestScope scope(ctx);
    const auto docs = load_sentences(ctx.out_dir() / files::kSentences);
    const auto vocab = textprep::Vocabulary::load(cfg.vocab);
    scope.manifest().record_input("vocab", cfg.vocab);
    std::size_t dropped = 0;
    const auto batch = tokenize_documents(docs, vocab, dropped);
    auto provider = make_provider(cfg);
    if (cfg.provider.spec.kind == embedding::ProviderKind::Cache) {
        scope.manifest().record_input("embeddings", cfg.provider.spec.endpoint_or_path);
    }

    const auto result = dsi::dsi_batch(batch, *provider, cfg.dsi_config(), {cfg.dsi.backend, cfg.jobs});
    scope.write(files::kDsi, dsi::to_csv(result.rows));
    StageRecord rec{"dsi", {}, 0.0, "ok", ""};
    rec.counts["documents"] = batch.size();
    rec.counts["rows"] = result.rows.size();
    std::size_t scored = 0;
    for (const auto& r : result.rows) scored += r.score.has_value();
    rec.counts["scored"] = scored;
    rec.counts["errors"] = result.rows.size() - scored;
    rec.counts["empty_sentences_dropped"] = dropped;
    if (result.aborted) {
        rec.status = "aborted";
        rec.note = result.abort_reason;
        log_of(ctx) << "error: provider failed after " << result.rows.size() << " of " << batch.size()
                    << " documents: " << result.abort_reason << "\n";
    }
    rec.seconds = seconds_since(t0);
    scope.finish(rec);
    return rec;
}

StageRecord run_analyze(StageContext& ctx) {
    const auto t0 = Clock::now();
    const auto& cfg = ctx.config;
    const auto& a = cfg.analysis;
    const int snapshot = cfg.eligibility.snapshot_year;
    ManifestScope scope(ctx);
    const auto records = load_stage_corpus(cfg);
    std::ifstream din(require_file(ctx.out_dir() / files::kDsi, "dsi"));
    const auto rows = dsi::rows_from_csv(din);
    const auto scored = join_scores(records, rows);
    StageRecord rec{"analyze", {}, 0.0, "ok", ""};
    rec.counts["scored_documents"] = scored.size();
    if (scored.empty()) throw IntegrityError("no scored documents to analyze");

    const std::string dir = "analysis/";
    if (a.table1) {
        std::vector<corpus::BiblioRecord> subset;
        for (const auto& s : scored) subset.push_back(*s.record);
        scope.write(dir + "table1.csv", corpus::to_csv(corpus::summarize(subset)));
    }
    if (a.table2) scope.write(dir + "table2.csv", to_csv(table2(scored)));
    if (a.trend) {
        const auto t = trend(scored);
        scope.write(dir + "trend.csv", to_csv(t));
        rec.counts["trend_cells"] = t.size();
    }
    if (a.boxplot) {
        const auto b = boxplot(scored);
        scope.write(dir + "boxplot.csv", to_csv(b.rows));
        scope.write(dir + "outliers.csv", to_csv(b.outliers));
        rec.counts["outliers"] = b.outliers.size();
    }
    if (a.levene) scope.write(dir + "levene.json", levene_by_field(scored).dump(2) + "\n");
    if (a.sensitivity_authors.enabled) {
        const auto r = sensitivity_by_authors(scored, a.sensitivity_authors, snapshot);
        scope.write(dir + "sensitivity_authors.csv", stats::to_csv(r));
        rec.counts["sensitivity_authors_uncovered"] = r.uncovered;
    }
    if (a.sensitivity_years.enabled) {
        const auto r = sensitivity_by_years(scored, a.sensitivity_years, snapshot);
        scope.write(dir + "sensitivity_years.csv", stats::to_csv(r));
        rec.counts["sensitivity_years_uncovered"] = r.uncovered;
    }

    std::vector<std::pair<std::string, std::vector<double>>> qq;
    for (auto [kind, enabled, name] : {std::tuple{ModelKind::Simple, a.models.simple, "simple"},
                                       std::tuple{ModelKind::Full, a.models.full, "full"}}) {
        if (!enabled) continue;
        const std::string file = dir + "regression_" + name + ".json";
        try {
            const auto report = fit_model(scored, kind, a.models, snapshot);
            scope.write(file, to_json(report).dump(2) + "\n");
            rec.counts[std::string("regression_") + name + "_n"] = report.fit.n;
            if (qq.empty()) qq.emplace_back(a.models.outcome + "_raw", report.raw_outcome);
            const auto& res = report.fit.residuals;
            qq.emplace_back(std::string("residuals_") + name, std::vector<double>(res.data(), res.data() + res.size()));
        } catch (const Error& e) {
            nlohmann::ordered_json j;
            j["model"] = name;
            j["error"] = e.kind() + ": " + e.what();
            scope.write(file, j.dump(2) + "\n");
            log_of(ctx) << "warning: " << name << " model not fitted: " << e.what() << "\n";
        }
    }
    if (a.qq) scope.write(dir + "qq.csv", qq_csv(qq));

    if (a.pairwise.enabled) {
        std::ifstream pin(require_file(a.pairwise.other_dsi, ""));
        const auto other = dsi::rows_from_csv(pin);
        scope.manifest().record_input("pairwise_other_dsi", a.pairwise.other_dsi);
        const auto p = pairwise(rows, other);
        scope.write(dir + "pairwise.csv", to_csv(p, a.pairwise.label_a, a.pairwise.label_b));
        scope.write(dir + "pairwise.json", to_json(p, a.pairwise.label_a, a.pairwise.label_b).dump(2) + "\n");
        rec.counts["pairwise_n"] = p.a.size();
    }
    rec.seconds = seconds_since(t0);
    scope.finish(rec);
    return rec;
}

CompareOutcome run_compare_backends(StageContext& ctx, double sentinel_offset) {
    const auto t0 = Clock::now();
    const auto& cfg = ctx.config;
    ManifestScope scope(ctx);
    const auto docs = load_sentences(ctx.out_dir() / files::kSentences);
    const auto vocab = textprep::Vocabulary::load(cfg.vocab);
    std::size_t dropped = 0;
    const auto batch = tokenize_documents(docs, vocab, dropped);
    auto provider = make_provider(cfg);
    const auto dcfg = cfg.dsi_config();
    const auto reference = dsi::reference_path();
    const auto blocked = dsi::blocked_path();

    struct Timing {
        std::size_t n = 0;
        double reference = 0.0;
        double blocked = 0.0;
    };
    std::map<std::string, Timing> timing;
    Timing all;
    CompareOutcome out;
    out.threshold = dsi::kEquivalenceThreshold;
    std::string per_doc = "record_id,subject,reference,blocked,abs_diff,error\n";
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& subject = docs[i].subject;
        std::vector<std::string> f{batch[i].record_id, subject};
        try {
            const auto emb = embedding::embed_document(*provider, batch[i].record_id, batch[i].sentences);
            auto t1 = Clock::now();
            const double r = reference(emb, dcfg).value;
            const double tr = seconds_since(t1);
            t1 = Clock::now();
            const double b = blocked(emb, dcfg).value + sentinel_offset;
            const double tb = seconds_since(t1);
            for (auto* t : {&timing[subject], &all}) {
                ++t->n;
                t->reference += tr;
                t->blocked += tb;
            }
            const double diff = std::abs(r - b);
            out.max_abs_diff = std::max(out.max_abs_diff, diff);
            f.insert(f.end(), {util::format_double(r), util::format_double(b), util::format_double(diff), ""});
        } catch (const TransportError&) {
            throw;
        } catch (const Error& e) {
            f.insert(f.end(), {"", "", "", e.kind() + ": " + e.what()});
        }
        per_doc += csv::join(f) + "\n";
    }
    out.passed = out.max_abs_diff < out.threshold;

    std::string times = "subject,n_docs,reference_total_s,reference_per_abstract_s,blocked_total_s,blocked_per_abstract_s\n";
    auto time_row = [&](const std::string& name, const Timing& t) {
        const double n = t.n ? static_cast<double>(t.n) : 1.0;
        times += csv::join({name, std::to_string(t.n), util::format_double(t.reference), util::format_double(t.reference / n),
                            util::format_double(t.blocked), util::format_double(t.blocked / n)}) +
                 "\n";
    };
    for (const auto& [subject, t] : timing) time_row(subject, t);
    time_row("Total", all);

    nlohmann::ordered_json report;
    report["documents"] = batch.size();
    report["compared"] = all.n;
    report["max_abs_diff"] = out.max_abs_diff;
    report["threshold"] = out.threshold;
    report["sentinel_offset"] = sentinel_offset;
    report["passed"] = out.passed;
    scope.write(files::kCompareCsv, per_doc);
    scope.write(files::kCompareJson, report.dump(2) + "\n");
    scope.write(files::kCompareTiming, times);

    out.record = {"compare-backends", {{"documents", batch.size()}, {"compared", all.n}}, 0.0, out.passed ? "ok" : "failed", ""};
    out.record.seconds = seconds_since(t0);
    scope.finish(out.record);
    return out;
}

}  // namespace scidsi::pipeline
