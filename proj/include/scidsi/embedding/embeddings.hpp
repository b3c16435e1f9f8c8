#pragma once

#include "scidsi/textprep/wordpiece.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace scidsi::embedding {

using Matrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ProviderKind { Synthetic, Cache, Sidecar };

ProviderKind provider_kind_from_string(std::string_view name);
std::string_view to_string(ProviderKind kind);

struct ProviderSpec {
    ProviderKind kind = ProviderKind::Synthetic;
    std::string model_id = "synthetic";
    std::vector<int> layer_indices = {6, 7};
    int hidden_dim = 0;  // 0 = ask the provider
    std::string endpoint_or_path;
    std::uint64_t seed = 0;

    /// Throws PreconditionError: empty or non-increasing layers, negative
    /// layer or hidden_dim.
    void validate() const;
};

/// Token matrices (token_count x hidden_dim) for one sentence, keyed by layer.
struct SentenceEmbeddings {
    std::size_t sentence_index = 0;
    std::map<int, Matrix> per_layer;

    Eigen::Index token_count() const;
    Eigen::Index hidden_dim() const;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual const ProviderSpec& spec() const = 0;
    virtual int hidden_dim() const = 0;

    /// `doc_id` is only meaningful to providers with random access (cache).
    virtual std::vector<SentenceEmbeddings> embed(const std::string& doc_id,
                                                  const std::vector<textprep::TokenizedSentence>& sentences) = 0;
};

/// Checks one sentence's matrices against the expected layers, token count
/// and width, and that every entry is finite. Throws IntegrityError naming
/// the sentence index.
void check_shape(const SentenceEmbeddings& emb, const std::vector<int>& layers, Eigen::Index token_count,
                 Eigen::Index hidden_dim);

/// Calls the provider and verifies the result: one entry per sentence in
/// order, shapes matching token counts and the provider's hidden_dim.
/// Throws PreconditionError for an empty document.
std::vector<SentenceEmbeddings> embed_document(EmbeddingProvider& provider, const std::string& doc_id,
                                               const std::vector<textprep::TokenizedSentence>& sentences);

}  // namespace scidsi::embedding
