#include "scidsi/embedding/embeddings.hpp"

#include "scidsi/errors.hpp"

namespace scidsi::embedding {

ProviderKind provider_kind_from_string(std::string_view name) {
    if (name == "synthetic") return ProviderKind::Synthetic;
    if (name == "cache") return ProviderKind::Cache;
    if (name == "sidecar") return ProviderKind::Sidecar;
    throw ConfigError("unknown provider kind: " + std::string(name));
}

std::string_view to_string(ProviderKind kind) {
    switch (kind) {
        case ProviderKind::Synthetic: return "synthetic";
        case ProviderKind::Cache: return "cache";
        case ProviderKind::Sidecar: return "sidecar";
    }
    return "unknown";
}

void ProviderSpec::validate() const {
    if (layer_indices.empty()) throw PreconditionError("layer_indices must not be empty");
    for (std::size_t i = 0; i < layer_indices.size(); ++i) {
        if (layer_indices[i] < 0) throw PreconditionError("layer indices must be non-negative");
        if (i > 0 && layer_indices[i] <= layer_indices[i - 1]) {
            throw PreconditionError("layer_indices must be strictly increasing");
        }
    }
    if (hidden_dim < 0) throw PreconditionError("hidden_dim must be positive");
    if (model_id.empty()) throw PreconditionError("model_id must not be empty");
}

Eigen::Index SentenceEmbeddings::token_count() const {
    return per_layer.empty() ? 0 : per_layer.begin()->second.rows();
}

Eigen::Index SentenceEmbeddings::hidden_dim() const {
    return per_layer.empty() ? 0 : per_layer.begin()->second.cols();
}

void check_shape(const SentenceEmbeddings& emb, const std::vector<int>& layers, Eigen::Index token_count,
                 Eigen::Index hidden_dim) {
    const auto where = "sentence " + std::to_string(emb.sentence_index) + ": ";
    if (emb.per_layer.size() != layers.size()) {
        throw IntegrityError(where + "expected " + std::to_string(layers.size()) + " layers, got " +
                             std::to_string(emb.per_layer.size()));
    }
    for (int layer : layers) {
        auto it = emb.per_layer.find(layer);
        if (it == emb.per_layer.end()) throw IntegrityError(where + "missing layer " + std::to_string(layer));
        const Matrix& m = it->second;
        if (m.rows() != token_count) {
            throw IntegrityError(where + "layer " + std::to_string(layer) + " has " + std::to_string(m.rows()) +
                                 " rows, expected " + std::to_string(token_count));
        }
        if (m.cols() != hidden_dim) {
            throw IntegrityError(where + "layer " + std::to_string(layer) + " has width " +
                                 std::to_string(m.cols()) + ", expected hidden_dim " + std::to_string(hidden_dim));
        }
        if (!m.allFinite()) throw IntegrityError(where + "layer " + std::to_string(layer) + " has NaN/Inf entries");
    }
}

std::vector<SentenceEmbeddings> embed_document(EmbeddingProvider& provider, const std::string& doc_id,
                                               const std::vector<textprep::TokenizedSentence>& sentences) {
    if (sentences.empty()) throw PreconditionError("cannot embed an empty document");
    auto out = provider.embed(doc_id, sentences);
    if (out.size() != sentences.size()) {
        throw IntegrityError("document " + doc_id + ": provider returned " + std::to_string(out.size()) +
                             " sentences, expected " + std::to_string(sentences.size()));
    }
    const auto& layers = provider.spec().layer_indices;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].sentence_index != i) {
            throw IntegrityError("document " + doc_id + ": sentence " + std::to_string(i) + " returned out of order");
        }
        check_shape(out[i], layers, static_cast<Eigen::Index>(sentences[i].ids.size()), provider.hidden_dim());
    }
    return out;
}

}  // namespace scidsi::embedding
