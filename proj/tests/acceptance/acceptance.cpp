// One line per acceptance criterion; exit status is the number of failures.
#include "dsi_oracle.hpp"
#include "test_paths.hpp"

#include "scidsi/corpus/field_map.hpp"
#include "scidsi/dsi/batch.hpp"
#include "scidsi/dsi/dsi.hpp"
#include "scidsi/embedding/cache.hpp"
#include "scidsi/embedding/synthetic.hpp"
#include "scidsi/pipeline/analysis.hpp"
#include "scidsi/pipeline/config.hpp"
#include "scidsi/pipeline/stages.hpp"
#include "scidsi/pipeline/synth.hpp"
#include "scidsi/stats/correlation.hpp"
#include "scidsi/stats/distributions.hpp"
#include "scidsi/stats/levene.hpp"
#include "scidsi/stats/ols.hpp"
#include "scidsi/stats/transforms.hpp"
#include "scidsi/textprep/wordpiece.hpp"
#include "scidsi/util/format.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>
#include <unistd.h>

using namespace scidsi;
namespace fs = std::filesystem;
using embedding::Matrix;
using embedding::SentenceEmbeddings;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_seconds, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    if (budget_seconds > 0 && s > budget_seconds) {
        o.passed = false;
        o.detail += "; over the " + util::format_double(budget_seconds) + " s budget";
    }
    if (!o.passed) ++failures;
    std::ostringstream time;
    time.precision(3);
    time << std::fixed << s;
    std::cout << (o.passed ? "PASS" : "FAIL") << "  [" << id << "] " << name << ": " << o.detail << " (" << time.str()
              << " s)" << std::endl;
}

std::string fmt(double v) { return util::format_double(v); }

std::vector<SentenceEmbeddings> random_doc(std::mt19937_64& rng, std::size_t n, int dim, const std::vector<int>& layers) {
    std::normal_distribution<float> normal;
    std::uniform_int_distribution<int> tokens(1, 8);
    std::vector<SentenceEmbeddings> doc(n);
    for (std::size_t i = 0; i < n; ++i) {
        doc[i].sentence_index = i;
        const int t = tokens(rng);
        for (int k : layers) {
            Matrix m(t, dim);
            for (Eigen::Index e = 0; e < m.size(); ++e) m.data()[e] = normal(rng);
            doc[i].per_layer.emplace(k, std::move(m));
        }
    }
    return doc;
}

std::vector<int> random_layers(std::mt19937_64& rng) {
    static const std::vector<std::vector<int>> options = {{6, 7}, {6}, {7}, {4, 6, 7}};
    return options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
}

dsi::DsiConfig config_for(const std::vector<int>& layers, dsi::DsiMode mode = dsi::DsiMode::Pooled) {
    dsi::DsiConfig c;
    c.mode = mode;
    c.layer_indices = layers;
    c.min_sentences = 2;
    return c;
}

textprep::TokenizedSentence tokens_of(std::size_t content, std::int32_t base) {
    textprep::TokenizedSentence s;
    s.ids.push_back(101);
    for (std::size_t i = 0; i < content; ++i) s.ids.push_back(base + static_cast<std::int32_t>(i));
    s.ids.push_back(102);
    s.tokens.assign(s.ids.size(), "t");
    return s;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("scidsi_accept_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

json load_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

Outcome tokenizer_golden() {
    const std::vector<std::int32_t> golden = {101,  18447, 15841, 3304,  11062, 1107, 3608, 1699, 1115,
                                              1132, 4405,  1118,  25958, 8983,  170,  3987, 1200, 174,
                                              8508, 22192, 1566,  181,   26312, 1179, 16812, 102};
    const auto vocab = textprep::Vocabulary::load(test::vocab_path());
    const auto t = textprep::tokenize(
        "Multi\xC2\xAD" "aged forest fragments in Atlantic France that are surrounded by meadows retain a richer "
        "epiphyte lichen flora",
        vocab);
    return {t.ids == golden, std::to_string(t.ids.size()) + " ids, " + (t.ids == golden ? "exact match" : "mismatch")};
}

Outcome dsi_oracle_equivalence() {
    std::mt19937_64 rng(20240601);
    double worst_pooled = 0.0, worst_tokens = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto n = std::uniform_int_distribution<std::size_t>(2, 10)(rng);
        const int dim = std::uniform_int_distribution<int>(2, 16)(rng);
        const auto layers = random_layers(rng);
        const auto doc = random_doc(rng, n, dim, layers);
        for (const auto& path : {dsi::reference_path(), dsi::blocked_path()}) {
            const double p = path(doc, config_for(layers)).value;
            worst_pooled = std::max(worst_pooled, std::abs(p - static_cast<double>(test::brute_pooled_dsi(doc, layers))));
            const double t = path(doc, config_for(layers, dsi::DsiMode::TokenPairs)).value;
            worst_tokens =
                std::max(worst_tokens, std::abs(t - static_cast<double>(test::brute_token_pairs_dsi(doc, layers))));
        }
    }
    const bool ok = worst_pooled < 1e-9 && worst_tokens < 1e-9;
    return {ok, "500 docs, max |engine - oracle| pooled " + fmt(worst_pooled) + ", token pairs " + fmt(worst_tokens)};
}

Outcome dsi_properties() {
    std::mt19937_64 rng(777);
    const int trials = 1000;
    int range_bad = 0, perm_bad = 0, scale_bad = 0, dup_bad = 0, dup_identity_bad = 0;
    double worst_scale = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const auto n = std::uniform_int_distribution<std::size_t>(3, 10)(rng);
        const int dim = std::uniform_int_distribution<int>(2, 16)(rng);
        const auto layers = random_layers(rng);
        auto doc = random_doc(rng, n, dim, layers);
        const auto cfg = config_for(layers);
        const double base = dsi::dsi_multilayer_blocked(doc, cfg).value;
        const double tok = dsi::dsi_multilayer_blocked(doc, config_for(layers, dsi::DsiMode::TokenPairs)).value;
        if (!(base >= 0.0 && base <= 2.0 && tok >= 0.0 && tok <= 2.0)) ++range_bad;

        auto shuffled = doc;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        if (dsi::dsi_multilayer_blocked(shuffled, cfg).value != base) ++perm_bad;

        for (float c : {1e-3f, 1.0f, 1e3f}) {
            auto scaled = doc;
            for (auto& s : scaled) {
                for (auto& [k, m] : s.per_layer) m *= c;
            }
            const double d = std::abs(dsi::dsi_multilayer_blocked(scaled, cfg).value - base);
            worst_scale = std::max(worst_scale, d);
            if (d > 1e-6) ++scale_bad;
        }

        // Copy one sentence and append it.
        const auto k = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
        auto dup = doc;
        dup.push_back(doc[k]);
        dup.back().sentence_index = n;
        const double after = dsi::dsi_multilayer_blocked(dup, cfg).value;
        if (after > base + 1e-12) ++dup_bad;
        // The copy adds sentence k's distances plus one zero per layer pair.
        long double added = 0;
        const auto L = layers.size();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == k) continue;
            for (int k1 : layers) {
                for (int k2 : layers) {
                    added += test::naive_cosine_distance(test::naive_pool(doc[k].per_layer.at(k1)),
                                                         test::naive_pool(doc[j].per_layer.at(k2)));
                }
            }
        }
        for (int k1 : layers) {
            for (int k2 : layers) {
                added += test::naive_cosine_distance(test::naive_pool(doc[k].per_layer.at(k1)),
                                                     test::naive_pool(doc[k].per_layer.at(k2)));
            }
        }
        const long double pairs = static_cast<long double>(n * (n - 1) / 2 * L * L);
        const long double expected = (base * pairs + added) / (pairs + static_cast<long double>(n * L * L));
        if (std::abs(static_cast<double>(expected) - after) > 1e-9) ++dup_identity_bad;
    }
    std::ostringstream d;
    d << trials << " trials each; violations: range " << range_bad << ", permutation " << perm_bad << ", scale "
      << scale_bad << " (max drift " << fmt(worst_scale) << "), duplicate monotonicity " << dup_bad
      << " (copy-update identity violations " << dup_identity_bad << ")";
    return {range_bad + perm_bad + scale_bad + dup_bad + dup_identity_bad == 0, d.str()};
}

Outcome backend_equivalence() {
    std::mt19937_64 rng(99);
    std::vector<std::vector<SentenceEmbeddings>> docs;
    for (int i = 0; i < 200; ++i) {
        const auto n = std::uniform_int_distribution<std::size_t>(3, 14)(rng);
        docs.push_back(random_doc(rng, n, 64, {6, 7}));
    }
    double worst = 0.0;
    for (auto mode : {dsi::DsiMode::Pooled, dsi::DsiMode::TokenPairs}) {
        worst = std::max(worst, dsi::backend_equivalence(docs, config_for({6, 7}, mode), dsi::reference_path(),
                                                         dsi::blocked_path()));
    }
    const double tripped =
        dsi::backend_equivalence(docs, config_for({6, 7}), dsi::reference_path(), [](const auto& d, const auto& c) {
            auto s = dsi::dsi_multilayer_blocked(d, c);
            s.value += 1e-3;
            return s;
        });
    const bool ok = worst < dsi::kEquivalenceThreshold && tripped > dsi::kEquivalenceThreshold;
    return {ok, "200 docs, both modes, max |reference - blocked| " + fmt(worst) + " < " + fmt(dsi::kEquivalenceThreshold) +
                    "; +1e-3 sentinel detected (" + fmt(tripped) + ")"};
}

Outcome throughput() {
    // Shape of a typical abstract: 8-12 sentences of 20-40 tokens, two layers
    // of a 768-wide encoder.
    TempDir tmp("throughput");
    embedding::ProviderSpec spec;
    spec.hidden_dim = 768;
    spec.seed = 3;
    embedding::SyntheticProvider synthetic(spec);
    std::mt19937_64 rng(5);
    std::vector<dsi::BatchDocument> docs;
    const int n_docs = 150;
    const auto path = tmp.path / "cache.dsic";
    {
        embedding::CacheWriter writer(path, spec.model_id, spec.layer_indices, spec.hidden_dim);
        for (int d = 0; d < n_docs; ++d) {
            dsi::BatchDocument doc{"D" + std::to_string(d), {}};
            const auto n = std::uniform_int_distribution<std::size_t>(8, 12)(rng);
            for (std::size_t s = 0; s < n; ++s) {
                doc.sentences.push_back(
                    tokens_of(std::uniform_int_distribution<std::size_t>(18, 38)(rng), 1000 + 50 * static_cast<int>(s)));
            }
            writer.add(doc.record_id, embedding::embed_document(synthetic, doc.record_id, doc.sentences));
            docs.push_back(std::move(doc));
        }
        writer.finish();
    }
    auto cached = spec;
    cached.kind = embedding::ProviderKind::Cache;
    cached.endpoint_or_path = path.string();
    embedding::CacheProvider provider(cached);
    const unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    const auto t0 = Clock::now();
    const auto result = dsi::dsi_batch(docs, provider, config_for({6, 7}), {dsi::Backend::Blocked, jobs});
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    const double rate = static_cast<double>(result.rows.size()) / s;
    std::size_t scored = 0;
    for (const auto& r : result.rows) scored += r.score.has_value();
    std::ostringstream d;
    d << scored << "/" << n_docs << " docs (768-dim, 2 layers) from cache in " << fmt(s) << " s = "
      << static_cast<long>(rate) << " docs/s with " << jobs << " thread(s), target 100";
    return {scored == static_cast<std::size_t>(n_docs) && rate >= 100.0, d.str()};
}

Outcome ols_correctness(const json& oracle) {
    std::ostringstream d;
    bool ok = true;
    // Noiseless fixtures.
    {
        std::vector<double> x, z, y;
        for (int i = 0; i < 40; ++i) {
            x.push_back(0.25 * i - 3.0);
            z.push_back(std::sin(0.7 * i));
            y.push_back(2.5 - 1.75 * x.back() + 0.6 * z.back());
        }
        stats::DesignMatrixBuilder b(x.size());
        b.add("x", x).add("z", z);
        const auto fit = stats::ols_fit(b.build(), y);
        const double err = std::max({std::abs(fit.coefficients[0] - 2.5), std::abs(fit.coefficients[1] + 1.75),
                                     std::abs(fit.coefficients[2] - 0.6)});
        ok &= err < 1e-10;
        d << "noiseless max error " << fmt(err);
    }
    // Six-point HC3 fixture.
    {
        const auto& o = oracle["hc3_small"];
        const std::vector<double> x = o["x"], y = o["y"], beta = o["beta"], se = o["se_hc3"];
        stats::DesignMatrixBuilder b(x.size());
        b.add("x", x);
        const auto fit = stats::ols_fit(b.build(), y, stats::CovarianceType::HC3);
        double err = 0.0;
        for (int j = 0; j < 2; ++j) {
            err = std::max({err, std::abs(fit.coefficients[j] - beta[static_cast<std::size_t>(j)]),
                            std::abs(fit.se_hc3[j] - se[static_cast<std::size_t>(j)])});
        }
        ok &= err < 1e-10;
        d << "; n=6 HC3 max error " << fmt(err);
    }
    // Monte-Carlo coverage of 95% HC3 intervals on a full-model replica.
    {
        const std::vector<std::string> levels = {"Life", "Multi", "Physical", "Social", "Technology"};
        const std::map<std::string, double> planted = {{"Intercept", 0.9},
                                                       {"Field[T.Multi]", 0.12},
                                                       {"Field[T.Physical]", -0.05},
                                                       {"Field[T.Social]", -0.2},
                                                       {"Field[T.Technology]", 0.08},
                                                       {"DSI", 0.03},
                                                       {"Pubyear", -0.1},
                                                       {"log10(AuthorCount)", 0.15}};
        const std::map<std::string, double> field_effect = {
            {"Life", 0.0}, {"Multi", 0.12}, {"Physical", -0.05}, {"Social", -0.2}, {"Technology", 0.08}};
        std::size_t covered = 0, total = 0, dsi_covered = 0;
        const int seeds = 100;
        for (int seed = 0; seed < seeds; ++seed) {
            std::mt19937_64 rng(1000 + seed);
            std::normal_distribution<double> normal;
            const std::size_t n = 500;
            std::vector<std::string> field(n);
            std::vector<double> dsi_v(n), year(n), authors(n), y(n);
            for (std::size_t i = 0; i < n; ++i) {
                field[i] = levels[i % levels.size()];
                dsi_v[i] = normal(rng);
                year[i] = normal(rng);
                authors[i] = normal(rng);
                y[i] = planted.at("Intercept") + field_effect.at(field[i]) + planted.at("DSI") * dsi_v[i] +
                       planted.at("Pubyear") * year[i] + planted.at("log10(AuthorCount)") * authors[i] +
                       0.4 * normal(rng);
            }
            stats::DesignMatrixBuilder b(n);
            b.add_categorical("Field", field).add("DSI", dsi_v).add("Pubyear", year).add("log10(AuthorCount)", authors);
            const auto fit = stats::ols_fit(b.build(), y, stats::CovarianceType::HC3);
            for (std::size_t j = 0; j < fit.names.size(); ++j) {
                const auto [lo, hi] = fit.confidence_interval(j, 0.95);
                const double truth = planted.at(fit.names[j]);
                const bool in = lo <= truth && truth <= hi;
                covered += in;
                ++total;
                if (fit.names[j] == "DSI") dsi_covered += in;
            }
        }
        const double coverage = static_cast<double>(covered) / static_cast<double>(total);
        ok &= coverage >= 0.93;
        d << "; 95% CI coverage " << fmt(100.0 * coverage) << "% over " << total << " intervals (" << seeds
          << " seeds, DSI alone " << dsi_covered << "/" << seeds << ")";
    }
    return {ok, d.str()};
}

Outcome effect_translation() {
    const double e = stats::effect_percent(0.0259);
    return {std::abs(e - 6.14) <= 0.05, "effect_percent(0.0259) = " + fmt(e) + "%"};
}

// Relative above 1 in magnitude, absolute below.
double scaled_error(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

double relative_error(double got, double want) {
    if (want == 0.0) return std::abs(got);
    return std::abs(got - want) / std::abs(want);
}

Outcome stats_cross_checks(const json& oracle) {
    double dist = 0.0;
    const auto& d = oracle["distributions"];
    for (const auto& r : d["t_cdf"]) dist = std::max(dist, std::abs(stats::student_t_cdf(r[0], r[1]) - r[2].get<double>()));
    for (const auto& r : d["t_two"]) dist = std::max(dist, std::abs(stats::student_t_two_tailed(r[0], r[1]) - r[2].get<double>()));
    for (const auto& r : d["t_quantile"]) dist = std::max(dist, scaled_error(stats::student_t_quantile(r[0], r[1]), r[2]));
    for (const auto& r : d["f_cdf"]) dist = std::max(dist, std::abs(stats::f_cdf(r[0], r[1], r[2]) - r[3].get<double>()));
    for (const auto& r : d["chisq_cdf"]) dist = std::max(dist, std::abs(stats::chisq_cdf(r[0], r[1]) - r[2].get<double>()));
    for (const auto& r : d["normal_cdf"]) dist = std::max(dist, relative_error(stats::normal_cdf(r[0]), r[1]));
    for (const auto& r : d["normal_quantile"]) dist = std::max(dist, scaled_error(stats::normal_quantile(r[0]), r[1]));
    for (const auto& r : d["ibeta"]) dist = std::max(dist, std::abs(stats::incomplete_beta(r[0], r[1], r[2]) - r[3].get<double>()));
    double tails = 0.0;
    for (const auto& r : d["f_sf"]) tails = std::max(tails, relative_error(stats::f_sf(r[0], r[1], r[2]), r[3]));
    for (const auto& r : d["chisq_sf"]) tails = std::max(tails, relative_error(stats::chisq_sf(r[0], r[1]), r[2]));
    for (const auto& r : d["gamma_p"]) dist = std::max(dist, std::abs(stats::gamma_p(r[0], r[1]) - r[2].get<double>()));

    const auto& pj = oracle["pearson"];
    const std::vector<double> px = pj["x"], py = pj["y"];
    const auto p = stats::pearson(px, py);
    const double pearson_err = std::max(std::abs(p.coefficient - pj["r"].get<double>()), relative_error(p.p_value, pj["p"]));

    const auto& sj = oracle["spearman"];
    const std::vector<double> sx = sj["x"], sy = sj["y"];
    const auto s = stats::spearman(sx, sy);
    // Brute force: mid-ranks by counting, then the product-moment formula.
    auto ranks = [](const std::vector<double>& v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double less = 0, equal = 0;
            for (double w : v) {
                less += w < v[i];
                equal += w == v[i];
            }
            r[i] = less + (equal + 1.0) / 2.0;
        }
        return r;
    };
    const auto rx = ranks(sx), ry = ranks(sy);
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= rx.size();
    my /= ry.size();
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    const double brute_rho = static_cast<double>(sxy / std::sqrt(sxx * syy));
    const double spearman_err = std::max({std::abs(s.coefficient - brute_rho), std::abs(s.coefficient - sj["rho"].get<double>()),
                                          relative_error(s.p_value, sj["p"])});

    const auto& lj = oracle["levene"];
    const std::vector<std::vector<double>> groups = lj["groups"];
    const auto lm = stats::levene(groups);
    const auto lmed = stats::levene(groups, stats::LeveneCenter::Median);
    const double levene_err = std::max({relative_error(*lm.statistic, lj["w_mean"]), relative_error(*lm.p_value, lj["p_mean"]),
                                        relative_error(*lmed.statistic, lj["w_median"]),
                                        relative_error(*lmed.p_value, lj["p_median"])});

    const auto& jj = oracle["jarque_bera"];
    const std::vector<double> jx = jj["x"];
    const auto jb = stats::jarque_bera(jx);
    const double jb_err = std::max({relative_error(jb.statistic, jj["jb"]), relative_error(jb.p_value, jj["p"]),
                                    std::abs(jb.skewness - jj["skew"].get<double>()),
                                    std::abs(jb.kurtosis - jj["kurtosis"].get<double>())});

    const bool ok = dist < 1e-10 && tails < 1e-10 && pearson_err < 1e-12 && spearman_err < 1e-12 && levene_err < 1e-10 && jb_err < 1e-10;
    std::ostringstream out;
    out << "max error: distributions " << fmt(dist) << ", upper tails (relative) " << fmt(tails) << ", pearson " << fmt(pearson_err) << ", spearman " << fmt(spearman_err)
        << ", levene " << fmt(levene_err) << ", jarque-bera " << fmt(jb_err);
    return {ok, out.str()};
}

std::map<std::string, std::string> data_outputs(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
        out[fs::relative(e.path(), dir).string()] = util::sha256_file(e.path());
    }
    return out;
}

pipeline::PipelineConfig pipeline_config(const fs::path& corpus, const fs::path& out) {
    json j = {{"corpus", {{"path", corpus.string()}}},
              {"seed", 42},
              {"provider", {{"kind", "synthetic"}, {"hidden_dim", 64}}},
              {"output_dir", out.string()},
              {"jobs", std::max(1u, std::thread::hardware_concurrency())}};
    return pipeline::config_from_json(j);
}

void run_pipeline(const pipeline::PipelineConfig& config) {
    pipeline::StageContext ctx{config, nullptr};
    std::ostringstream quiet;
    ctx.log = &quiet;
    pipeline::run_ingest(ctx);
    pipeline::run_train_segmenter(ctx);
    pipeline::run_segment(ctx);
    if (pipeline::run_dsi(ctx).status != "ok") throw std::runtime_error("dsi stage aborted");
    pipeline::run_analyze(ctx);
}

Outcome pipeline_determinism(const fs::path& workdir) {
    const auto map = corpus::FieldMap::load(test::data_dir() / "field_map.v1.csv");
    pipeline::SynthOptions o;
    o.n_records = 1000;
    o.seed = 42;
    util::write_file_atomic(workdir / "corpus.jsonl", corpus::to_jsonl(pipeline::synthetic_corpus(map, o)));
    run_pipeline(pipeline_config(workdir / "corpus.jsonl", workdir / "run_a"));
    run_pipeline(pipeline_config(workdir / "corpus.jsonl", workdir / "run_b"));
    const auto a = data_outputs(workdir / "run_a");
    const auto b = data_outputs(workdir / "run_b");
    std::size_t differing = 0;
    for (const auto& [k, v] : a) differing += !b.contains(k) || b.at(k) != v;
    const auto dsi_rows = pipeline::load_sentences(workdir / "run_a" / pipeline::files::kSentences).size();
    std::ostringstream d;
    d << "1000 records, " << dsi_rows << " scored; " << a.size() << " data files, " << differing << " differ";
    return {a.size() == b.size() && differing == 0 && a.size() >= 15, d.str()};
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

Outcome report_schemas(const fs::path& workdir) {
    // Uses the outputs of the determinism run.
    const auto dir = workdir / "run_a" / "analysis";
    std::vector<std::string> missing;
    const auto header = "," + first_line(dir / "table2.csv") + ",";
    for (const char* c : {"field", "n", "min", "q1", "median", "mean", "q3", "max", "range", "sd"}) {
        if (header.find("," + std::string(c) + ",") == std::string::npos) missing.push_back(std::string("table2.") + c);
    }
    std::string fields_seen;
    {
        std::ifstream in(dir / "table2.csv");
        std::string line;
        std::getline(in, line);
        std::size_t rows = 0;
        while (std::getline(in, line)) ++rows;
        if (rows != 6) missing.push_back("table2 rows (5 fields + All)");
    }
    for (const char* model : {"simple", "full"}) {
        const auto j = load_json(dir / (std::string("regression_") + model + ".json"));
        for (const char* k : {"formula", "outcome", "cov_type", "N", "R2", "adj_R2", "F", "F_p", "MSE", "JB", "JB_p"}) {
            if (!j.contains(k)) missing.push_back(std::string(model) + "." + k);
        }
        bool has_dsi = false;
        for (const auto& c : j.value("coefficients", json::array())) {
            if (c.at("name") == "DSI") {
                has_dsi = true;
                for (const char* k : {"beta", "p", "se", "ci99_low", "ci99_high"}) {
                    if (!c.contains(k)) missing.push_back(std::string(model) + ".DSI." + k);
                }
            }
        }
        if (!has_dsi) missing.push_back(std::string(model) + ".DSI");
        const std::string formula = j.value("formula", "");
        if (formula.find("C(Field)") == std::string::npos) missing.push_back(std::string(model) + ".C(Field)");
    }
    const auto full = load_json(dir / "regression_full.json");
    if (full.value("cov_type", "") != "HC3") missing.push_back("full.cov_type=HC3");
    std::string detail = "table2 columns min..sd per field and All; regression N, R2, F, F_p, beta, p, MSE, JB for both models";
    if (!missing.empty()) {
        detail = "missing:";
        for (const auto& m : missing) detail += " " + m;
    }
    return {missing.empty(), detail};
}

}  // namespace

int main() {
    const auto oracle = load_json(test::fixture_dir() / "stats_oracle.json");
    std::cout << "acceptance criteria" << std::endl;
    criterion(1, "tokenizer golden ids", 1.0, tokenizer_golden);
    criterion(2, "DSI vs brute-force oracle", 30.0, dsi_oracle_equivalence);
    criterion(3, "DSI property suite", 60.0, dsi_properties);
    criterion(4, "reference vs blocked backend", 60.0, backend_equivalence);
    criterion(5, "throughput from cached embeddings", 0.0, throughput);
    criterion(6, "OLS correctness", 120.0, [&] { return ols_correctness(oracle); });
    criterion(7, "effect translation", 0.0, effect_translation);
    criterion(8, "statistics cross-checks", 30.0, [&] { return stats_cross_checks(oracle); });
    TempDir work("pipeline");
    criterion(9, "pipeline determinism", 120.0, [&] { return pipeline_determinism(work.path); });
    criterion(10, "report schemas carry every summary and regression column", 0.0, [&] { return report_schemas(work.path); });
    std::cout << failures << " criterion/criteria failed" << std::endl;
    return failures == 0 ? 0 : 1;
}
