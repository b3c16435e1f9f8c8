#include "scidsi/dsi/batch.hpp"

#include "scidsi/errors.hpp"
#include "scidsi/util/csv.hpp"
#include "scidsi/util/format.hpp"

#include <json.hpp>

#include <atomic>
#include <charconv>
#include <map>
#include <mutex>
#include <thread>

namespace scidsi::dsi {

namespace {

BatchRow score_one(const BatchDocument& doc, embedding::EmbeddingProvider& provider, const DsiConfig& config,
                   Backend backend) {
    BatchRow row;
    row.record_id = doc.record_id;
    if (doc.sentences.size() < static_cast<std::size_t>(config.min_sentences)) {
        row.error = "DocumentTooShort: document has " + std::to_string(doc.sentences.size()) +
                    " sentences, minimum is " + std::to_string(config.min_sentences);
        return row;
    }
    try {
        const auto emb = embedding::embed_document(provider, doc.record_id, doc.sentences);
        DsiScore s = backend == Backend::Reference ? dsi_multilayer(emb, config) : dsi_multilayer_blocked(emb, config);
        s.model_id = provider.spec().model_id;
        for (const auto& t : doc.sentences) s.truncated_any |= t.truncated;
        row.score = std::move(s);
    } catch (const TransportError&) {
        throw;
    } catch (const Error& e) {
        row.error = e.kind() + ": " + e.what();
    }
    return row;
}

const char* const kColumns[] = {"record_id", "dsi", "n_sentences", "n_distances", "mode", "model_id",
                                "truncated_any", "error"};

}  // namespace

BatchResult dsi_batch(const std::vector<BatchDocument>& docs, embedding::EmbeddingProvider& provider,
                      const DsiConfig& config, const BatchOptions& options) {
    config.validate();
    std::vector<std::optional<BatchRow>> slots(docs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex abort_mutex;
    std::string abort_reason;

    auto worker = [&] {
        while (!stop.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= docs.size()) return;
            try {
                slots[i] = score_one(docs[i], provider, config, options.backend);
            } catch (const TransportError& e) {
                std::lock_guard lock(abort_mutex);
                if (!stop.exchange(true)) abort_reason = e.what();
            }
        }
    };

    const unsigned n_threads = std::max(1u, std::min<unsigned>(options.parallelism, static_cast<unsigned>(docs.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }

    BatchResult result;
    result.aborted = stop.load();
    result.abort_reason = abort_reason;
    for (auto& slot : slots) {
        if (slot) result.rows.push_back(std::move(*slot));
    }
    result.processed = result.rows.size();
    return result;
}

std::string to_csv(const std::vector<BatchRow>& rows) {
    std::string out = csv::join({std::begin(kColumns), std::end(kColumns)}) + "\n";
    for (const auto& r : rows) {
        std::vector<std::string> f{r.record_id};
        if (r.score) {
            const auto& s = *r.score;
            f.insert(f.end(), {util::format_double(s.value), std::to_string(s.n_sentences),
                               std::to_string(s.n_distances), std::string(to_string(s.mode)), s.model_id,
                               s.truncated_any ? "true" : "false", ""});
        } else {
            f.insert(f.end(), {"", "", "", "", "", "", r.error});
        }
        out += csv::join(f) + "\n";
    }
    return out;
}

std::string to_jsonl(const std::vector<BatchRow>& rows) {
    std::string out;
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["record_id"] = r.record_id;
        if (r.score) {
            j["dsi"] = r.score->value;
            j["n_sentences"] = r.score->n_sentences;
            j["n_distances"] = r.score->n_distances;
            j["mode"] = std::string(to_string(r.score->mode));
            j["model_id"] = r.score->model_id;
            j["truncated_any"] = r.score->truncated_any;
            j["error"] = nullptr;
        } else {
            for (const char* k : {"dsi", "n_sentences", "n_distances", "mode", "model_id", "truncated_any"}) j[k] = nullptr;
            j["error"] = r.error;
        }
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<BatchRow> rows_from_csv(std::istream& in) {
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header) throw SchemaError("DSI table is empty; missing column: record_id");
    std::map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < header->fields.size(); ++i) column.emplace(header->fields[i], i);
    for (const char* required : {"record_id", "dsi"}) {
        if (!column.contains(required)) throw SchemaError(std::string("DSI table missing column: ") + required);
    }
    auto to_size = [](const std::string& s, std::size_t line) {
        std::size_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size()) throw ParseError("DSI table line " + std::to_string(line) + ": bad integer");
        return v;
    };
    std::vector<BatchRow> rows;
    while (auto row = reader.next()) {
        if (row->fields.size() != header->fields.size()) {
            throw ParseError("DSI table line " + std::to_string(row->line) + ": expected " +
                             std::to_string(header->fields.size()) + " columns");
        }
        auto get = [&](const char* name) -> std::string {
            const auto it = column.find(name);
            return it == column.end() ? std::string() : row->fields[it->second];
        };
        BatchRow r;
        r.record_id = get("record_id");
        const auto value = get("dsi");
        if (value.empty()) {
            r.error = get("error");
        } else {
            DsiScore s;
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), s.value);
            if (ec != std::errc{} || p != value.data() + value.size()) {
                throw ParseError("DSI table line " + std::to_string(row->line) + ": bad dsi value");
            }
            if (const auto v = get("n_sentences"); !v.empty()) s.n_sentences = to_size(v, row->line);
            if (const auto v = get("n_distances"); !v.empty()) s.n_distances = to_size(v, row->line);
            if (const auto v = get("mode"); !v.empty()) s.mode = dsi_mode_from_string(v);
            s.model_id = get("model_id");
            s.truncated_any = get("truncated_any") == "true";
            r.score = s;
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace scidsi::dsi
