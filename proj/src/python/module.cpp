#include "scidsi/corpus/field_map.hpp"
#include "scidsi/dsi/dsi.hpp"
#include "scidsi/errors.hpp"
#include "scidsi/pipeline/config.hpp"
#include "scidsi/pipeline/manifest.hpp"
#include "scidsi/pipeline/stages.hpp"
#include "scidsi/pipeline/synth.hpp"
#include "scidsi/stats/correlation.hpp"
#include "scidsi/stats/levene.hpp"
#include "scidsi/stats/ols.hpp"
#include "scidsi/stats/transforms.hpp"
#include "scidsi/textprep/punkt.hpp"
#include "scidsi/textprep/wordpiece.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <sstream>

namespace py = pybind11;
using namespace scidsi;

namespace {

embedding::Matrix to_matrix(const py::handle& obj) {
    auto arr = py::array_t<float, py::array::c_style | py::array::forcecast>::ensure(obj);
    if (!arr || arr.ndim() != 2) throw py::value_error("each layer must be a 2-D array (tokens x hidden_dim)");
    embedding::Matrix m(arr.shape(0), arr.shape(1));
    std::copy(arr.data(), arr.data() + arr.size(), m.data());
    return m;
}

std::vector<embedding::SentenceEmbeddings> to_document(const py::list& sentences) {
    std::vector<embedding::SentenceEmbeddings> doc;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        embedding::SentenceEmbeddings s;
        s.sentence_index = i;
        for (const auto& [layer, value] : py::cast<py::dict>(sentences[i])) {
            s.per_layer.emplace(py::cast<int>(layer), to_matrix(value));
        }
        doc.push_back(std::move(s));
    }
    return doc;
}

py::dict score_dict(const dsi::DsiScore& s) {
    py::dict d;
    d["dsi"] = s.value;
    d["n_sentences"] = s.n_sentences;
    d["n_distances"] = s.n_distances;
    d["mode"] = std::string(dsi::to_string(s.mode));
    return d;
}

py::dict stage_dict(const pipeline::StageRecord& r) {
    py::dict d;
    d["name"] = r.name;
    d["status"] = r.status;
    d["counts"] = r.counts;
    d["seconds"] = r.seconds;
    d["note"] = r.note;
    return d;
}

}  // namespace

PYBIND11_MODULE(_scidsi, m) {
    m.attr("__version__") = pipeline::kToolVersion;

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error;
    error.call_once_and_store_result([&] { return py::exception<Error>(m, "ScidsiError"); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error.get_stored(), (e.kind() + ": " + e.what()).c_str());
        }
    });

    py::class_<textprep::Vocabulary>(m, "Vocabulary")
        .def_static("load", py::overload_cast<const std::filesystem::path&, std::size_t>(&textprep::Vocabulary::load),
                    py::arg("path"), py::arg("max_input_tokens") = 512)
        .def("__len__", &textprep::Vocabulary::size)
        .def("id_of", &textprep::Vocabulary::id_of)
        .def("token_of", &textprep::Vocabulary::token_of)
        .def_property_readonly("fingerprint", &textprep::Vocabulary::fingerprint);

    m.def(
        "tokenize",
        [](const std::string& sentence, const textprep::Vocabulary& vocab) {
            const auto t = textprep::tokenize(sentence, vocab);
            py::dict d;
            d["ids"] = t.ids;
            d["tokens"] = t.tokens;
            d["truncated"] = t.truncated;
            return d;
        },
        py::arg("sentence"), py::arg("vocab"));

    py::class_<textprep::SegmenterState>(m, "Segmenter")
        .def("to_json", [](const textprep::SegmenterState& s) { return textprep::to_json(s).dump(); });
    m.def(
        "train_segmenter", [](const std::vector<std::string>& texts) { return textprep::train_segmenter(texts); },
        py::arg("texts"));
    m.def(
        "segment",
        [](const std::string& title, const std::string& abstract, const textprep::SegmenterState& state) {
            std::vector<std::tuple<std::size_t, std::size_t, std::string>> out;
            for (const auto& s : textprep::segment_document(title, abstract, state).spans) {
                out.emplace_back(s.start, s.end, s.text);
            }
            return out;
        },
        py::arg("title"), py::arg("abstract"), py::arg("segmenter"));

    m.def(
        "cosine_distance",
        [](const std::vector<double>& a, const std::vector<double>& b) { return dsi::cosine_distance(a, b); },
        py::arg("a"), py::arg("b"));
    m.def(
        "dsi",
        [](const py::list& sentences, const std::vector<int>& layers, const std::string& mode, const std::string& backend,
           int min_sentences) {
            dsi::DsiConfig c;
            c.mode = dsi::dsi_mode_from_string(mode);
            c.layer_indices = layers;
            c.min_sentences = min_sentences;
            const auto doc = to_document(sentences);
            const auto s = dsi::backend_from_string(backend) == dsi::Backend::Reference
                               ? dsi::dsi_multilayer(doc, c)
                               : dsi::dsi_multilayer_blocked(doc, c);
            return score_dict(s);
        },
        py::arg("sentences"), py::arg("layers") = std::vector<int>{6, 7}, py::arg("mode") = "pooled",
        py::arg("backend") = "blocked", py::arg("min_sentences") = 3,
        "sentences: list of {layer: ndarray(tokens, hidden_dim)}");
    m.def(
        "dsi_single_vector",
        [](const std::vector<std::vector<double>>& vectors, int min_sentences) {
            return score_dict(dsi::dsi_single_vector(vectors, min_sentences));
        },
        py::arg("vectors"), py::arg("min_sentences") = 3);

    m.def(
        "pearson",
        [](const std::vector<double>& x, const std::vector<double>& y) {
            const auto c = stats::pearson(x, y);
            return std::make_pair(c.coefficient, c.p_value);
        },
        py::arg("x"), py::arg("y"));
    m.def(
        "spearman",
        [](const std::vector<double>& x, const std::vector<double>& y) {
            const auto c = stats::spearman(x, y);
            return std::make_pair(c.coefficient, c.p_value);
        },
        py::arg("x"), py::arg("y"));
    m.def(
        "levene",
        [](const std::vector<std::vector<double>>& groups, const std::string& center) {
            if (center != "mean" && center != "median") throw py::value_error("center must be 'mean' or 'median'");
            const auto r = stats::levene(groups, center == "mean" ? stats::LeveneCenter::Mean : stats::LeveneCenter::Median);
            return std::make_pair(r.statistic, r.p_value);
        },
        py::arg("groups"), py::arg("center") = "mean");
    m.def(
        "jarque_bera",
        [](const std::vector<double>& x) {
            const auto r = stats::jarque_bera(x);
            py::dict d;
            d["statistic"] = r.statistic;
            d["p_value"] = r.p_value;
            d["skewness"] = r.skewness;
            d["kurtosis"] = r.kurtosis;
            return d;
        },
        py::arg("residuals"));
    m.def("effect_percent", &stats::effect_percent, py::arg("beta_per_sd"));
    m.def("log10p1", &stats::log10p1, py::arg("x"));

    m.def(
        "ols",
        [](const std::vector<std::pair<std::string, std::vector<double>>>& columns, const std::vector<double>& y,
           const std::string& cov, const std::map<std::string, std::vector<std::string>>& categorical) {
            if (cov != "classic" && cov != "HC3") throw py::value_error("cov must be 'classic' or 'HC3'");
            stats::DesignMatrixBuilder b(y.size());
            for (const auto& [name, levels] : categorical) b.add_categorical(name, levels);
            for (const auto& [name, values] : columns) b.add(name, values);
            const auto fit =
                stats::ols_fit(b.build(), y, cov == "HC3" ? stats::CovarianceType::HC3 : stats::CovarianceType::Classic);
            py::dict d;
            d["names"] = fit.names;
            std::vector<double> beta, se, p;
            for (std::size_t j = 0; j < fit.names.size(); ++j) {
                beta.push_back(fit.coefficients[static_cast<Eigen::Index>(j)]);
                se.push_back(fit.se(j));
                p.push_back(fit.p_values[static_cast<Eigen::Index>(j)]);
            }
            d["beta"] = beta;
            d["se"] = se;
            d["p"] = p;
            d["r2"] = fit.r2;
            d["adj_r2"] = fit.adj_r2;
            d["f"] = fit.f_stat;
            d["f_p"] = fit.f_p;
            d["mse"] = fit.mse;
            d["n"] = fit.n;
            return d;
        },
        py::arg("columns"), py::arg("y"), py::arg("cov") = "classic",
        py::arg("categorical") = std::map<std::string, std::vector<std::string>>{},
        "columns: list of (name, values); an intercept is always added");

    m.def(
        "synthetic_corpus_jsonl",
        [](std::size_t n_records, std::uint64_t seed, const std::filesystem::path& field_map) {
            pipeline::SynthOptions o;
            o.n_records = n_records;
            o.seed = seed;
            const auto map = corpus::FieldMap::load(field_map.empty() ? pipeline::default_data_dir() / "field_map.v1.csv"
                                                                      : field_map);
            return corpus::to_jsonl(pipeline::synthetic_corpus(map, o));
        },
        py::arg("n_records"), py::arg("seed") = 0, py::arg("field_map") = std::filesystem::path{});

    m.def(
        "run_stage",
        [](const std::filesystem::path& config_path, const std::string& stage) {
            static const std::map<std::string, pipeline::StageRecord (*)(pipeline::StageContext&)> stages = {
                {"ingest", &pipeline::run_ingest},   {"train-segmenter", &pipeline::run_train_segmenter},
                {"segment", &pipeline::run_segment}, {"embed", &pipeline::run_embed},
                {"dsi", &pipeline::run_dsi},         {"analyze", &pipeline::run_analyze}};
            const auto it = stages.find(stage);
            if (it == stages.end()) throw py::value_error("unknown stage: " + stage);
            std::ostringstream log;
            pipeline::StageContext ctx{pipeline::load_config(config_path), &log};
            std::filesystem::create_directories(ctx.out_dir());
            pipeline::OutputLock lock(ctx.out_dir());
            pipeline::StageRecord record;
            {
                py::gil_scoped_release release;
                record = it->second(ctx);
            }
            auto d = stage_dict(record);
            d["log"] = log.str();
            return d;
        },
        py::arg("config"), py::arg("stage"));
}
