#pragma once

#include "scidsi/embedding/embeddings.hpp"

#include <cstdint>
#include <span>

namespace scidsi::embedding {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Standard-normal deviate keyed by (seed, token id, position, layer, dim).
/// Integer hashing feeds Box-Muller on two 53-bit uniforms.
double synthetic_value(std::uint64_t seed, std::int32_t token_id, std::uint64_t position, int layer,
                       std::uint64_t dim);

/// token_ids.size() x hidden_dim matrix of synthetic_value entries.
Matrix synthetic_embed(std::span<const std::int32_t> token_ids, int layer_index, std::uint64_t seed,
                       int hidden_dim);

/// Stateless stand-in for model inference.
class SyntheticProvider : public EmbeddingProvider {
public:
    /// Throws PreconditionError unless spec.hidden_dim >= 1.
    explicit SyntheticProvider(ProviderSpec spec);

    const ProviderSpec& spec() const override { return spec_; }
    int hidden_dim() const override { return spec_.hidden_dim; }
    std::vector<SentenceEmbeddings> embed(const std::string& doc_id,
                                          const std::vector<textprep::TokenizedSentence>& sentences) override;

private:
    ProviderSpec spec_;
};

}  // namespace scidsi::embedding
