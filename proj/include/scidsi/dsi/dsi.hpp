#pragma once

#include "scidsi/embedding/embeddings.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scidsi::dsi {

enum class DsiMode { Pooled, TokenPairs, SingleVector };

std::string_view to_string(DsiMode mode);
DsiMode dsi_mode_from_string(std::string_view name);

enum class Backend { Reference, Blocked };

std::string_view to_string(Backend backend);
Backend backend_from_string(std::string_view name);

struct DsiConfig {
    DsiMode mode = DsiMode::Pooled;
    std::vector<int> layer_indices = {6, 7};
    int min_sentences = 3;

    /// Throws PreconditionError (min_sentences < 2, bad layers, single-vector mode).
    void validate() const;
};

struct DsiScore {
    double value = 0.0;
    std::size_t n_sentences = 0;
    std::size_t n_distances = 0;
    DsiMode mode = DsiMode::Pooled;
    std::string model_id;
    bool truncated_any = false;
};

/// 1 - cos(a, b) with 64-bit pairwise-summed dot products, clamped to [0, 2].
/// Throws DimensionError or ZeroNormError.
double cosine_distance(std::span<const double> a, std::span<const double> b);
double cosine_distance(std::span<const float> a, std::span<const float> b);

/// Sum of products by pairwise summation in double precision.
double pairwise_dot(std::span<const double> a, std::span<const double> b);

/// Mean over token rows of one layer. Throws PreconditionError for an
/// empty matrix or a missing layer.
Eigen::VectorXd pool_sentence(const embedding::SentenceEmbeddings& emb, int layer);

/// Mean of the distances after sorting them, so that the result depends on
/// the multiset of distances only.
double stable_mean(std::vector<double>& distances);

/// Naive reference path. Throws DocumentTooShort when the document has
/// fewer than min_sentences sentences, ZeroNormError naming sentence indices.
DsiScore dsi_multilayer(const std::vector<embedding::SentenceEmbeddings>& doc, const DsiConfig& config);

/// Blocked path: vectors normalized once, one Gram product per layer combo.
/// `sentinel_offset` is added to the first distance (test hook).
DsiScore dsi_multilayer_blocked(const std::vector<embedding::SentenceEmbeddings>& doc, const DsiConfig& config,
                                double sentinel_offset = 0.0);

/// Mean cosine distance over all unordered pairs of single vectors.
DsiScore dsi_single_vector(const std::vector<std::vector<double>>& vectors, int min_sentences = 3);

using DsiPath = std::function<DsiScore(const std::vector<embedding::SentenceEmbeddings>&, const DsiConfig&)>;

DsiPath reference_path();
DsiPath blocked_path(double sentinel_offset = 0.0);

inline constexpr double kEquivalenceThreshold = 1e-5;

/// Largest |a - b| over the documents.
double backend_equivalence(const std::vector<std::vector<embedding::SentenceEmbeddings>>& docs,
                           const DsiConfig& config, const DsiPath& path_a, const DsiPath& path_b);

}  // namespace scidsi::dsi
