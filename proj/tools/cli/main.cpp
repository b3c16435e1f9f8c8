#include "scidsi/corpus/field_map.hpp"
#include "scidsi/errors.hpp"
#include "scidsi/pipeline/config.hpp"
#include "scidsi/pipeline/stages.hpp"
#include "scidsi/pipeline/synth.hpp"
#include "scidsi/util/format.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace scidsi;
using namespace scidsi::pipeline;

namespace {

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> jobs;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("-c,--config", o.config, "Pipeline config (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Override the config seed");
    cmd->add_option("-o,--out", o.out, "Override the output directory");
    cmd->add_option("-j,--jobs", o.jobs, "Worker threads for DSI scoring")->check(CLI::PositiveNumber);
}

PipelineConfig resolve(const CommonOptions& o) {
    auto c = load_config(o.config);
    if (o.seed) {
        c.seed = *o.seed;
        c.provider.spec.seed = *o.seed;
    }
    if (o.out) c.output_dir = fs::absolute(*o.out);
    if (o.jobs) c.jobs = *o.jobs;
    c.validate();
    return c;
}

void report(const StageRecord& r) {
    std::cerr << r.name << ": " << r.status;
    for (const auto& [k, v] : r.counts) std::cerr << ' ' << k << '=' << v;
    std::cerr << " (" << util::format_double(r.seconds) << " s)";
    if (!r.note.empty()) std::cerr << " " << r.note;
    std::cerr << "\n";
}

int status_code(const StageRecord& r) { return r.status == "ok" ? kExitOk : kExitData; }

// Runs `body` holding the output lock.
int locked(const CommonOptions& o, const std::function<int(StageContext&)>& body) {
    StageContext ctx{resolve(o), &std::cerr};
    fs::create_directories(ctx.out_dir());
    OutputLock lock(ctx.out_dir());
    return body(ctx);
}

int run_all(StageContext& ctx) {
    for (auto* stage : {&run_ingest, &run_train_segmenter, &run_segment}) {
        const auto r = stage(ctx);
        report(r);
    }
    const auto d = run_dsi(ctx);
    report(d);
    if (d.status != "ok") return kExitData;
    report(run_analyze(ctx));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sentence-embedding divergence scoring for scientific abstracts"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    CommonOptions common;
    std::function<int()> action;

    struct StageCommand {
        const char* name;
        const char* help;
        StageRecord (*fn)(StageContext&);
    };
    const StageCommand stages[] = {
        {"ingest", "Parse, map fields and filter the corpus", &run_ingest},
        {"train-segmenter", "Train sentence segmenters on the ingested abstracts", &run_train_segmenter},
        {"segment", "Split titles and abstracts into sentences", &run_segment},
        {"embed", "Write token embeddings to a cache file", &run_embed},
        {"dsi", "Score every segmented document", &run_dsi},
        {"analyze", "Descriptive tables, correlations and regressions", &run_analyze},
    };
    for (const auto& s : stages) {
        auto* cmd = app.add_subcommand(s.name, s.help);
        add_common(cmd, common);
        cmd->callback([&, fn = s.fn] {
            action = [&, fn] {
                return locked(common, [fn](StageContext& ctx) {
                    const auto r = fn(ctx);
                    report(r);
                    return status_code(r);
                });
            };
        });
    }

    auto* run = app.add_subcommand("run", "ingest, train-segmenter, segment, dsi and analyze in order");
    add_common(run, common);
    run->callback([&] { action = [&] { return locked(common, run_all); }; });

    double sentinel = 0.0;
    auto* compare = app.add_subcommand("compare-backends", "Check the blocked scorer against the reference scorer");
    add_common(compare, common);
    compare->add_option("--sentinel-offset", sentinel, "Add this offset to blocked scores (self-test)");
    compare->callback([&] {
        action = [&] {
            return locked(common, [&](StageContext& ctx) {
                const auto r = run_compare_backends(ctx, sentinel);
                report(r.record);
                std::cout << "max_abs_diff=" << util::format_double(r.max_abs_diff)
                          << " threshold=" << util::format_double(r.threshold) << (r.passed ? " PASS" : " FAIL") << "\n";
                return r.passed ? kExitOk : kExitThreshold;
            });
        };
    });

    SynthOptions synth;
    std::string synth_out;
    std::string synth_map = (default_data_dir() / "field_map.v1.csv").string();
    auto* sc = app.add_subcommand("synth-corpus", "Write a deterministic synthetic corpus as JSONL");
    sc->add_option("-n,--records", synth.n_records, "Number of records")->check(CLI::PositiveNumber);
    sc->add_option("--seed", synth.seed, "Generator seed");
    sc->add_option("--first-year", synth.first_year);
    sc->add_option("--last-year", synth.last_year);
    sc->add_option("--field-map", synth_map)->check(CLI::ExistingFile);
    sc->add_option("-o,--out", synth_out, "Output file")->required();
    sc->callback([&] {
        action = [&] {
            const auto map = corpus::FieldMap::load(synth_map);
            const auto records = synthetic_corpus(map, synth);
            util::write_file_atomic(synth_out, corpus::to_jsonl(records));
            std::cerr << "synth-corpus: records=" << records.size() << "\n";
            return int{kExitOk};
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    try {
        return action();
    } catch (const Error& e) {
        std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}
