#include "dsi_oracle.hpp"
#include "mock_sidecar.hpp"
#include "test_paths.hpp"

#include "scidsi/corpus/field_map.hpp"
#include "scidsi/errors.hpp"
#include "scidsi/pipeline/analysis.hpp"
#include "scidsi/pipeline/config.hpp"
#include "scidsi/pipeline/manifest.hpp"
#include "scidsi/pipeline/stages.hpp"
#include "scidsi/pipeline/synth.hpp"
#include "scidsi/util/csv.hpp"
#include "scidsi/util/format.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace scidsi;
using namespace scidsi::pipeline;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("scidsi_pipe_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

const corpus::FieldMap& field_map() {
    static const auto map = corpus::FieldMap::load(test::data_dir() / "field_map.v1.csv");
    return map;
}

std::vector<corpus::BiblioRecord> small_corpus(std::size_t n, std::uint64_t seed) {
    SynthOptions o;
    o.n_records = n;
    o.seed = seed;
    return synthetic_corpus(field_map(), o);
}

json base_config(const fs::path& dir, const fs::path& corpus_path) {
    return {{"corpus", {{"path", corpus_path.string()}}},
            {"seed", 5},
            {"segmenter", {{"min_subject_docs", 5}}},
            {"provider", {{"kind", "synthetic"}, {"hidden_dim", 16}}},
            {"output_dir", (dir / "out").string()}};
}

StageContext context(const json& j) { return StageContext{config_from_json(j), nullptr}; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void run_pipeline(StageContext& ctx) {
    run_ingest(ctx);
    run_train_segmenter(ctx);
    run_segment(ctx);
    REQUIRE(run_dsi(ctx).status == "ok");
    run_analyze(ctx);
}

std::map<std::string, std::string> tree_hashes(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
        out[fs::relative(e.path(), dir).string()] = util::sha256_file(e.path());
    }
    return out;
}

corpus::BiblioRecord planted(const std::string& id, const std::string& subject, int year, int authors) {
    corpus::BiblioRecord r;
    r.record_id = id;
    r.title = "T";
    r.abstract = "A";
    r.pub_year = year;
    r.author_count = authors;
    r.primary_subject = subject;
    if (field_map().contains(subject)) r.field = field_map().map(subject);
    r.cit3 = 1;
    r.cit5 = 2;
    r.cit_total = 3;
    return r;
}

dsi::BatchRow row(const std::string& id, double value) {
    dsi::DsiScore s;
    s.value = value;
    return {id, s, ""};
}

}  // namespace

TEST_CASE("config rejects unknown keys with their dotted path") {
    TempDir t;
    auto j = base_config(t.path, t.path / "c.jsonl");
    j["analysis"]["models"]["bogus"] = true;
    try {
        config_from_json(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("analysis.models.bogus") != std::string::npos);
    }
    auto top = base_config(t.path, t.path / "c.jsonl");
    top["outptu_dir"] = "x";
    CHECK_THROWS_AS(config_from_json(top), ConfigError);
}

TEST_CASE("config defaults, relative paths and validation") {
    TempDir t;
    std::ofstream(t.path / "cfg.json") << R"({"corpus":{"path":"data/c.csv","format":"csv"},
        "provider":{"kind":"synthetic","hidden_dim":8,"layers":[2,5]},"seed":9,"output_dir":"o"})";
    const auto c = load_config(t.path / "cfg.json");
    CHECK(c.corpus.path == t.path / "data" / "c.csv");
    CHECK(c.corpus.format == corpus::RecordFormat::Csv);
    CHECK(c.output_dir == t.path / "o");
    CHECK(c.provider.spec.seed == 9);
    CHECK(c.dsi_config().layer_indices == std::vector<int>{2, 5});
    CHECK(c.analysis.models.outcome == "cit5");
    CHECK(fs::exists(c.field_map));
    CHECK(fs::exists(c.vocab));

    const auto round = config_from_json(json::parse(to_json(c).dump()));
    CHECK(to_json(round) == to_json(c));

    json no_dim = {{"corpus", {{"path", "x"}}}, {"provider", {{"kind", "synthetic"}}}};
    CHECK_THROWS_AS(config_from_json(no_dim), ConfigError);
    json bad_layers = {{"corpus", {{"path", "x"}}}, {"provider", {{"kind", "synthetic"}, {"hidden_dim", 4}, {"layers", {3, 3}}}}};
    CHECK_THROWS_AS(config_from_json(bad_layers), ConfigError);
    json bad_mode = {{"corpus", {{"path", "x"}}}, {"provider", {{"hidden_dim", 4}}}, {"dsi", {{"mode", "median"}}}};
    CHECK_THROWS_AS(config_from_json(bad_mode), ConfigError);
    CHECK_THROWS_AS(load_config(t.path / "missing.json"), ConfigError);
}

TEST_CASE("manifest keeps one entry per stage and hashes outputs") {
    TempDir t;
    util::write_file_atomic(t.path / "a.txt", "abc");
    {
        auto m = RunManifest::load_or_create(t.path);
        m.record_output("a.txt");
        m.record_stage({"ingest", {{"kept", 3}}, 0.5, "ok", ""});
        m.record_stage({"ingest", {{"kept", 4}}, 0.5, "ok", ""});
        m.save();
    }
    const auto m = RunManifest::load_or_create(t.path);
    REQUIRE(m.stages().size() == 1);
    CHECK(m.stage("ingest")->counts.at("kept") == 4);
    CHECK(m.outputs().at("a.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(m.stage("dsi") == nullptr);
    CHECK(json::parse(slurp(t.path / "manifest.json")).at("tool_version") == kToolVersion);

    {
        OutputLock lock(t.path);
        CHECK_THROWS_AS(OutputLock(t.path), IoError);
    }
    CHECK_NOTHROW(OutputLock(t.path));
}

TEST_CASE("synthetic corpus is deterministic per seed") {
    const auto a = small_corpus(300, 1);
    const auto b = small_corpus(300, 1);
    const auto c = small_corpus(300, 2);
    CHECK(a == b);
    CHECK(corpus::to_jsonl(a) != corpus::to_jsonl(c));
    std::size_t unmapped = 0;
    for (const auto& r : a) {
        CHECK(r.pub_year >= 1994);
        CHECK(r.pub_year <= 2024);
        const auto spaces = corpus::count_spaces(r.abstract);
        CHECK(spaces >= 170);
        CHECK(spaces <= 320);
        if (!field_map().contains(r.primary_subject)) ++unmapped;
        if (r.cit3 && r.cit5) CHECK(*r.cit3 <= *r.cit5);
        if (r.cit5 && r.cit_total) CHECK(*r.cit5 <= *r.cit_total);
    }
    CHECK(unmapped < 15);
}

TEST_CASE("ingest keeps going past a malformed CSV row") {
    TempDir t;
    const auto records = small_corpus(60, 3);
    std::string text = "id,doi,title,abstract,pub_year,author_count,primary_subject,cit3,cit5,cit_total\n";
    auto opt = [](const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : std::string(); };
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        text += csv::join({r.record_id, r.doi.value_or(""), r.title, r.abstract, std::to_string(r.pub_year),
                           std::to_string(r.author_count), r.primary_subject, opt(r.cit3), opt(r.cit5), opt(r.cit_total)}) +
                "\n";
        if (i == 10) text += "BAD1,,only,three\n";
    }
    util::write_file_atomic(t.path / "c.csv", text);
    auto j = base_config(t.path, t.path / "c.csv");
    j["corpus"]["format"] = "csv";
    std::ostringstream log;
    auto ctx = context(j);
    ctx.log = &log;
    const auto rec = run_ingest(ctx);
    CHECK(rec.status == "ok");
    CHECK(rec.counts.at("parsed") == 60);
    CHECK(rec.counts.at("rejected") == 1);
    CHECK(log.str().find("1 malformed") != std::string::npos);
    const auto rejects = slurp(ctx.out_dir() / files::kRejects);
    CHECK(std::count(rejects.begin(), rejects.end(), '\n') == 1);
    CHECK(rejects.find("\"line\":13") != std::string::npos);

    const auto kept = load_stage_corpus(ctx.config);
    CHECK(kept.size() == rec.counts.at("kept"));
    for (const auto& r : kept) {
        CHECK(r.field.has_value());
        CHECK(r.author_count > 0);
    }
}

TEST_CASE("pipeline reruns are byte-identical and embeddings cache reproduces scores") {
    TempDir t;
    util::write_file_atomic(t.path / "c.jsonl", corpus::to_jsonl(small_corpus(150, 11)));
    auto j = base_config(t.path, t.path / "c.jsonl");
    j["jobs"] = 3;
    j["output_dir"] = (t.path / "run1").string();
    auto first = context(j);
    run_pipeline(first);
    j["output_dir"] = (t.path / "run2").string();
    j["jobs"] = 1;
    auto second = context(j);
    run_pipeline(second);
    const auto h1 = tree_hashes(t.path / "run1");
    CHECK(h1.size() >= 15);
    CHECK(h1 == tree_hashes(t.path / "run2"));

    const auto manifest = json::parse(slurp(t.path / "run1" / "manifest.json"));
    CHECK(manifest.at("outputs").at("dsi.csv") == h1.at("dsi.csv"));
    for (const char* s : {"ingest", "train-segmenter", "segment", "dsi", "analyze"}) {
        CHECK(RunManifest::load_or_create(t.path / "run1").stage(s) != nullptr);
    }

    run_embed(first);
    auto cj = j;
    cj["provider"] = {{"kind", "cache"},
                      {"model_id", "synthetic"},
                      {"endpoint_or_path", (t.path / "run1" / files::kEmbeddings).string()}};
    cj["output_dir"] = (t.path / "run1").string();
    auto cached = context(cj);
    const auto before = slurp(t.path / "run1" / files::kDsi);
    run_dsi(cached);
    CHECK(slurp(t.path / "run1" / files::kDsi) == before);

    cj["provider"]["model_id"] = "another-model";
    auto mismatch = context(cj);
    try {
        run_dsi(mismatch);
        FAIL("expected CacheSpecMismatch");
    } catch (const CacheSpecMismatch& e) {
        CHECK(exit_code_for(e) == kExitData);
    }
    CHECK_THROWS_AS(run_embed(cached), ConfigError);
}

TEST_CASE("compare-backends passes and the sentinel trips it") {
    TempDir t;
    util::write_file_atomic(t.path / "c.jsonl", corpus::to_jsonl(small_corpus(80, 4)));
    auto ctx = context(base_config(t.path, t.path / "c.jsonl"));
    run_ingest(ctx);
    run_train_segmenter(ctx);
    run_segment(ctx);
    const auto ok = run_compare_backends(ctx);
    CHECK(ok.passed);
    CHECK(ok.max_abs_diff < 1e-12);
    CHECK(ok.threshold == doctest::Approx(1e-5));
    const auto bad = run_compare_backends(ctx, 1e-3);
    CHECK_FALSE(bad.passed);
    CHECK(bad.max_abs_diff == doctest::Approx(1e-3).epsilon(1e-6));
    CHECK(bad.record.status == "failed");
    const auto timing = slurp(ctx.out_dir() / files::kCompareTiming);
    CHECK(timing.find("\nTotal,") != std::string::npos);
    CHECK(json::parse(slurp(ctx.out_dir() / files::kCompareJson)).at("passed") == false);
}

TEST_CASE("dsi stage records an abort and keeps finished rows") {
    TempDir t;
    test::MockSidecar sidecar;
    sidecar.fail_next = 1000000;
    util::write_file_atomic(t.path / "c.jsonl", corpus::to_jsonl(small_corpus(40, 8)));
    auto j = base_config(t.path, t.path / "c.jsonl");
    j["provider"] = {{"kind", "sidecar"}, {"model_id", "mock-model"}, {"endpoint_or_path", sidecar.url()},
                     {"max_attempts", 1}, {"timeout_seconds", 5}};
    std::ostringstream log;
    auto ctx = context(j);
    ctx.log = &log;
    run_ingest(ctx);
    run_train_segmenter(ctx);
    run_segment(ctx);
    const auto rec = run_dsi(ctx);
    CHECK(rec.status == "aborted");
    CHECK(rec.counts.at("rows") == 0);
    CHECK_FALSE(rec.note.empty());
    CHECK(log.str().find("provider failed") != std::string::npos);
    CHECK(slurp(ctx.out_dir() / files::kDsi).starts_with("record_id,dsi,"));
    CHECK(RunManifest::load_or_create(ctx.out_dir()).stage("dsi")->status == "aborted");

    sidecar.fail_next = 0;
    const auto again = run_dsi(ctx);
    CHECK(again.status == "ok");
    CHECK(again.counts.at("scored") == again.counts.at("documents"));
}

TEST_CASE("table2 recovers planted per-field means") {
    std::vector<corpus::BiblioRecord> records;
    std::vector<dsi::BatchRow> rows;
    const std::vector<std::pair<std::string, double>> plan = {
        {"Mycology", 0.61}, {"Geology", 0.72}, {"Economics", 0.83}, {"Multidisciplinary Sciences", 0.5}};
    int k = 0;
    for (const auto& [subject, value] : plan) {
        for (int i = 0; i < 25; ++i) {
            const auto id = "R" + std::to_string(k++);
            records.push_back(planted(id, subject, 2000 + i % 10, 1 + i % 7));
            rows.push_back(row(id, value));
        }
    }
    const auto scored = join_scores(records, rows);
    const auto t2 = table2(scored);
    std::map<std::string, double> by_group;
    for (const auto& r : t2) {
        if (r.mean) by_group[r.group] = *r.mean;
        if (r.sd && r.group != "All") CHECK(std::abs(*r.sd) < 1e-12);
    }
    CHECK(by_group.size() == 5);
    for (const auto& [subject, value] : plan) {
        const auto name = std::string(corpus::to_string(field_map().map(subject)));
        CHECK(by_group.at(name) == doctest::Approx(value).epsilon(1e-12));
    }
    CHECK(by_group.at("All") == doctest::Approx((0.61 + 0.72 + 0.83 + 0.5) / 4).epsilon(1e-12));

    rows.push_back(row("unknown-id", 0.4));
    CHECK_THROWS_AS(join_scores(records, rows), IntegrityError);
}

TEST_CASE("pairwise comparison of two DSI tables") {
    std::vector<dsi::BatchRow> a, b;
    for (int i = 0; i < 50; ++i) {
        const double v = 0.5 + 0.004 * i + 0.001 * (i % 3);
        a.push_back(row("D" + std::to_string(i), v));
        b.push_back(row("D" + std::to_string(49 - i), 0.0));
    }
    for (auto& r : b) {
        const int i = std::stoi(r.record_id.substr(1));
        r.score->value = a[static_cast<std::size_t>(i)].score->value + 0.05;
    }
    b.push_back(row("extra", 0.9));
    const auto p = pairwise(a, b);
    CHECK(p.a.size() == 50);
    CHECK(p.pearson.coefficient == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.b_greater == 50);
    CHECK(p.a_greater == 0);
    const auto j = to_json(p, "base", "large");
    CHECK(j.dump().find("large") != std::string::npos);
    CHECK(to_csv(p, "base", "large").starts_with("record_id,dsi_base,dsi_large"));
}

TEST_CASE("analyze reports which DSI column is missing") {
    TempDir t;
    util::write_file_atomic(t.path / "c.jsonl", corpus::to_jsonl(small_corpus(30, 2)));
    auto ctx = context(base_config(t.path, t.path / "c.jsonl"));
    run_ingest(ctx);
    util::write_file_atomic(ctx.out_dir() / files::kDsi, "record_id,score\nSYN000001,0.5\n");
    try {
        run_analyze(ctx);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("dsi") != std::string::npos);
        CHECK(exit_code_for(e) == kExitData);
    }
}

TEST_CASE("simple and full models match direct fits on the same sample") {
    std::vector<corpus::BiblioRecord> records;
    std::vector<dsi::BatchRow> rows;
    const std::vector<std::string> subjects = {"Mycology", "Geology", "Economics", "Acoustics", "Multidisciplinary Sciences"};
    for (int i = 0; i < 120; ++i) {
        auto r = planted("M" + std::to_string(i), subjects[static_cast<std::size_t>(i) % subjects.size()], 1995 + i % 20,
                         i % 17 == 0 ? 0 : 1 + (i * 7) % 9);
        r.cit5 = (i * 13) % 29;
        if (i == 5) r.pub_year = 2024;  // window still open
        records.push_back(r);
        rows.push_back(row(r.record_id, 0.55 + 0.001 * ((i * 37) % 101)));
    }
    const auto scored = join_scores(records, rows);
    ModelSettings settings;
    const auto simple = fit_model(scored, ModelKind::Simple, settings, 2025);
    const auto full = fit_model(scored, ModelKind::Full, settings, 2025);
    CHECK(simple.formula == "log10(cit5 + 1) ~ DSI + C(Field)");
    CHECK(simple.fit.cov_type == stats::CovarianceType::Classic);
    CHECK(full.fit.cov_type == stats::CovarianceType::HC3);
    CHECK(simple.standardized.empty());
    CHECK(full.standardized == std::vector<std::string>{"DSI", "Pubyear", "log10(AuthorCount)"});
    CHECK(simple.fit.n == 119);
    std::size_t zero_authors = 0;
    for (const auto& r : records) zero_authors += r.author_count == 0 && r.pub_year != 2024;
    CHECK(full.fit.n == 119 - zero_authors);

    std::vector<double> y, d;
    std::vector<std::string> f;
    for (const auto& s : scored) {
        if (s.record->pub_year == 2024) continue;
        y.push_back(std::log10(static_cast<double>(*s.record->cit5) + 1.0));
        d.push_back(s.dsi);
        f.push_back(std::string(corpus::to_string(*s.record->field)));
    }
    stats::DesignMatrixBuilder b(y.size());
    b.add_categorical("Field", f).add("DSI", d);
    const auto direct = stats::ols_fit(b.build(), y);
    REQUIRE(direct.names == simple.fit.names);
    for (Eigen::Index j = 0; j < direct.coefficients.size(); ++j) {
        CHECK(simple.fit.coefficients[j] == doctest::Approx(direct.coefficients[j]).epsilon(1e-12));
    }
    const auto j = to_json(full);
    CHECK(j.at("cov_type") == "HC3");
    CHECK(j.at("N") == full.fit.n);
}
