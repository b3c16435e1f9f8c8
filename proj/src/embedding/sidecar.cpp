#include "scidsi/embedding/sidecar.hpp"

#include "scidsi/errors.hpp"
#include "scidsi/util/base64.hpp"

#include <httplib.h>
#include <json.hpp>

#include <bit>
#include <cstring>
#include <mutex>
#include <thread>

namespace scidsi::embedding {

using nlohmann::json;

struct SidecarClient::Impl {
    std::string endpoint;
    SidecarOptions options;
    std::mutex mutex;  // httplib::Client is not safe for concurrent requests
    httplib::Client client;

    Impl(std::string ep, SidecarOptions opts) : endpoint(std::move(ep)), options(std::move(opts)), client(endpoint) {
        client.set_connection_timeout(options.connect_timeout);
        client.set_read_timeout(options.read_timeout);
        client.set_write_timeout(options.read_timeout);
    }

    json request(const std::string& method, const std::string& path, const json* body) {
        std::string last_error;
        auto delay = options.backoff;
        for (int attempt = 1; attempt <= std::max(1, options.max_attempts); ++attempt) {
            httplib::Result res;
            {
                std::lock_guard lock(mutex);
                httplib::Headers headers;
                if (!options.shared_secret.empty()) headers.emplace("X-Sidecar-Token", options.shared_secret);
                if (method == "GET") {
                    res = client.Get(path, headers);
                } else {
                    res = client.Post(path, headers, body->dump(), "application/json");
                }
            }
            if (!res) {
                last_error = "connection failed: " + httplib::to_string(res.error());
            } else if (res->status >= 500 || res->status == 429) {
                last_error = "HTTP " + std::to_string(res->status);
            } else if (res->status == 404) {
                throw ConfigError("sidecar " + path + ": not found: " + res->body);
            } else if (res->status >= 400) {
                throw PreconditionError("sidecar " + path + " rejected request (HTTP " +
                                        std::to_string(res->status) + "): " + res->body);
            } else {
                try {
                    return json::parse(res->body);
                } catch (const json::parse_error& e) {
                    throw IntegrityError("sidecar " + path + ": malformed JSON response: " + e.what());
                }
            }
            if (attempt < options.max_attempts) {
                std::this_thread::sleep_for(delay);
                delay *= 2;
            }
        }
        throw TransportError("sidecar " + endpoint + path + " unavailable after " +
                             std::to_string(options.max_attempts) + " attempts: " + last_error);
    }
};

namespace {

Matrix decode_matrix(const json& value, bool base64, Eigen::Index rows, Eigen::Index cols, const std::string& where) {
    Matrix m(rows, cols);
    if (base64) {
        if (!value.is_string()) throw IntegrityError(where + ": expected base64 string");
        std::string bytes;
        try {
            bytes = util::base64_decode(value.get<std::string>());
        } catch (const ParseError& e) {
            throw IntegrityError(where + ": " + e.what());
        }
        if (bytes.size() != static_cast<std::size_t>(rows * cols) * 4) {
            throw IntegrityError(where + ": payload holds " + std::to_string(bytes.size() / 4) + " floats, expected " +
                                 std::to_string(rows) + " x " + std::to_string(cols));
        }
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            std::uint32_t bits;
            std::memcpy(&bits, bytes.data() + 4 * i, 4);
            if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
            std::memcpy(m.data() + i, &bits, 4);
        }
        return m;
    }
    if (!value.is_array() || static_cast<Eigen::Index>(value.size()) != rows) {
        throw IntegrityError(where + ": expected " + std::to_string(rows) + " rows");
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = value[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw IntegrityError(where + ": row " + std::to_string(r) + " width differs from hidden_dim " +
                                 std::to_string(cols));
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& v = row[static_cast<std::size_t>(c)];
            if (!v.is_number()) throw IntegrityError(where + ": non-numeric entry");
            m(r, c) = v.get<float>();
        }
    }
    return m;
}

}  // namespace

SidecarClient::SidecarClient(std::string endpoint, SidecarOptions options)
    : impl_(std::make_unique<Impl>(std::move(endpoint), std::move(options))) {}

SidecarClient::~SidecarClient() = default;

bool SidecarClient::healthy() {
    try {
        const auto j = impl_->request("GET", "/healthz", nullptr);
        return j.value("status", "") == "ok";
    } catch (const TransportError&) {
        return false;
    }
}

std::vector<ModelHandle> SidecarClient::models() {
    const auto j = impl_->request("GET", "/models", nullptr);
    std::vector<ModelHandle> out;
    try {
        for (const auto& m : j.at("models")) {
            out.push_back({m.at("model_id").get<std::string>(), m.at("hidden_dim").get<int>(),
                           m.at("n_layers").get<int>(), m.at("max_input_tokens").get<int>()});
        }
    } catch (const json::exception& e) {
        throw IntegrityError(std::string("sidecar /models: malformed response: ") + e.what());
    }
    return out;
}

std::vector<SentenceEmbeddings> SidecarClient::embed(const std::string& model_id, const std::vector<int>& layers,
                                                     const std::vector<std::vector<std::int32_t>>& sentences,
                                                     int expected_hidden_dim) {
    const bool b64 = impl_->options.base64;
    const json body{{"model_id", model_id},
                    {"layer_indices", layers},
                    {"sentences", sentences},
                    {"encoding", b64 ? "base64" : "json"}};
    const auto j = impl_->request("POST", "/embed", &body);
    std::vector<SentenceEmbeddings> out;
    try {
        const int dim = j.at("hidden_dim").get<int>();
        if (dim < 1) throw IntegrityError("sidecar /embed: hidden_dim must be positive");
        if (expected_hidden_dim > 0 && dim != expected_hidden_dim) {
            throw IntegrityError("sidecar /embed: hidden_dim " + std::to_string(dim) + " differs from expected " +
                                 std::to_string(expected_hidden_dim));
        }
        if (j.contains("model_id") && j.at("model_id").get<std::string>() != model_id) {
            throw IntegrityError("sidecar /embed: response is for a different model");
        }
        const bool resp_b64 = j.value("encoding", b64 ? "base64" : "json") == "base64";
        const auto& results = j.at("results");
        if (results.size() != sentences.size()) {
            throw IntegrityError("sidecar /embed: " + std::to_string(results.size()) + " results for " +
                                 std::to_string(sentences.size()) + " sentences");
        }
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& r = results[i];
            const std::string where = "sidecar /embed sentence " + std::to_string(i);
            const auto tokens = r.at("token_count").get<Eigen::Index>();
            if (tokens != static_cast<Eigen::Index>(sentences[i].size())) {
                throw IntegrityError(where + ": token_count " + std::to_string(tokens) + " differs from request length " +
                                     std::to_string(sentences[i].size()));
            }
            SentenceEmbeddings emb;
            emb.sentence_index = i;
            const auto& per_layer = r.at("layers");
            for (int layer : layers) {
                const auto key = std::to_string(layer);
                if (!per_layer.contains(key)) throw IntegrityError(where + ": missing layer " + key);
                emb.per_layer.emplace(layer, decode_matrix(per_layer.at(key), resp_b64, tokens, dim,
                                                           where + " layer " + key));
            }
            out.push_back(std::move(emb));
        }
    } catch (const json::exception& e) {
        throw IntegrityError(std::string("sidecar /embed: malformed response: ") + e.what());
    }
    return out;
}

SingleVectors SidecarClient::embed_single(const std::string& model_id, const std::vector<std::string>& texts) {
    const json body{{"model_id", model_id}, {"texts", texts}};
    const auto j = impl_->request("POST", "/embed_single", &body);
    SingleVectors out;
    try {
        out.dim = j.at("dim").get<int>();
        out.pooling = j.value("pooling", "");
        for (const auto& v : j.at("vectors")) {
            auto vec = v.get<std::vector<float>>();
            if (static_cast<int>(vec.size()) != out.dim) throw IntegrityError("sidecar /embed_single: vector width differs from dim");
            out.vectors.push_back(std::move(vec));
        }
    } catch (const json::exception& e) {
        throw IntegrityError(std::string("sidecar /embed_single: malformed response: ") + e.what());
    }
    if (out.vectors.size() != texts.size()) throw IntegrityError("sidecar /embed_single: vector count differs from text count");
    return out;
}

SidecarProvider::SidecarProvider(ProviderSpec spec, SidecarOptions options)
    : spec_(std::move(spec)), client_(spec_.endpoint_or_path, std::move(options)) {
    spec_.validate();
    if (spec_.hidden_dim == 0) {
        for (const auto& m : client_.models()) {
            if (m.model_id == spec_.model_id) spec_.hidden_dim = m.hidden_dim;
        }
        if (spec_.hidden_dim == 0) throw ConfigError("sidecar does not serve model " + spec_.model_id);
    }
}

std::vector<SentenceEmbeddings> SidecarProvider::embed(const std::string&,
                                                       const std::vector<textprep::TokenizedSentence>& sentences) {
    std::vector<std::vector<std::int32_t>> ids;
    ids.reserve(sentences.size());
    for (const auto& s : sentences) ids.push_back(s.ids);
    return client_.embed(spec_.model_id, spec_.layer_indices, ids, spec_.hidden_dim);
}

}  // namespace scidsi::embedding
