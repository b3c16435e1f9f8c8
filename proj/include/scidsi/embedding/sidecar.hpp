#pragma once

#include "scidsi/embedding/embeddings.hpp"

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace scidsi::embedding {

struct ModelHandle {
    std::string model_id;
    int hidden_dim = 0;
    int n_layers = 0;
    int max_input_tokens = 0;
};

struct SidecarOptions {
    int max_attempts = 3;
    std::chrono::milliseconds backoff{200};  // doubled after each failed attempt
    std::chrono::seconds connect_timeout{5};
    std::chrono::seconds read_timeout{120};
    bool base64 = true;  // false requests nested JSON arrays
    std::string shared_secret;  // sent as X-Sidecar-Token when non-empty
};

struct SingleVectors {
    int dim = 0;
    std::string pooling;
    std::vector<std::vector<float>> vectors;
};

/// HTTP client for the embedding sidecar. Connection failures, 5xx and 429
/// responses are retried up to max_attempts and then raise TransportError.
/// 404 raises ConfigError (unknown model), other 4xx PreconditionError.
/// Malformed or inconsistent payloads raise IntegrityError.
class SidecarClient {
public:
    explicit SidecarClient(std::string endpoint, SidecarOptions options = {});
    ~SidecarClient();
    SidecarClient(const SidecarClient&) = delete;
    SidecarClient& operator=(const SidecarClient&) = delete;

    bool healthy();
    std::vector<ModelHandle> models();

    /// Result i holds one token_count x hidden_dim matrix per requested layer.
    /// `expected_hidden_dim` (if > 0) must equal the reported width.
    std::vector<SentenceEmbeddings> embed(const std::string& model_id, const std::vector<int>& layers,
                                          const std::vector<std::vector<std::int32_t>>& sentences,
                                          int expected_hidden_dim = 0);

    SingleVectors embed_single(const std::string& model_id, const std::vector<std::string>& texts);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

class SidecarProvider : public EmbeddingProvider {
public:
    /// spec.endpoint_or_path is the base URL. A zero hidden_dim is looked up
    /// through /models.
    explicit SidecarProvider(ProviderSpec spec, SidecarOptions options = {});

    const ProviderSpec& spec() const override { return spec_; }
    int hidden_dim() const override { return spec_.hidden_dim; }
    std::vector<SentenceEmbeddings> embed(const std::string& doc_id,
                                          const std::vector<textprep::TokenizedSentence>& sentences) override;

private:
    ProviderSpec spec_;
    SidecarClient client_;
};

}  // namespace scidsi::embedding
