#include "scidsi/embedding/synthetic.hpp"

#include "scidsi/errors.hpp"

#include <cmath>
#include <numbers>

namespace scidsi::embedding {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double synthetic_value(std::uint64_t seed, std::int32_t token_id, std::uint64_t position, int layer,
                       std::uint64_t dim) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(token_id)));
    h = mix64(h ^ position);
    h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(layer)));
    h = mix64(h ^ dim);
    const std::uint64_t a = mix64(h ^ 0x1ULL);
    const std::uint64_t b = mix64(h ^ 0x2ULL);
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    const double u1 = static_cast<double>((a >> 11) + 1) * kScale;  // (0, 1]
    const double u2 = static_cast<double>(b >> 11) * kScale;        // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Matrix synthetic_embed(std::span<const std::int32_t> token_ids, int layer_index, std::uint64_t seed,
                       int hidden_dim) {
    if (hidden_dim < 1) throw PreconditionError("hidden_dim must be at least 1");
    Matrix m(static_cast<Eigen::Index>(token_ids.size()), hidden_dim);
    for (std::size_t t = 0; t < token_ids.size(); ++t) {
        for (int d = 0; d < hidden_dim; ++d) {
            m(static_cast<Eigen::Index>(t), d) = static_cast<float>(
                synthetic_value(seed, token_ids[t], t, layer_index, static_cast<std::uint64_t>(d)));
        }
    }
    return m;
}

SyntheticProvider::SyntheticProvider(ProviderSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    if (spec_.hidden_dim < 1) throw PreconditionError("synthetic provider needs hidden_dim >= 1");
}

std::vector<SentenceEmbeddings> SyntheticProvider::embed(const std::string&,
                                                         const std::vector<textprep::TokenizedSentence>& sentences) {
    std::vector<SentenceEmbeddings> out(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        out[i].sentence_index = i;
        for (int layer : spec_.layer_indices) {
            out[i].per_layer.emplace(layer, synthetic_embed(sentences[i].ids, layer, spec_.seed, spec_.hidden_dim));
        }
    }
    return out;
}

}  // namespace scidsi::embedding
