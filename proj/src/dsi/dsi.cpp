#include "scidsi/dsi/dsi.hpp"

#include "scidsi/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace scidsi::dsi {

namespace {

constexpr std::size_t kPairwiseBase = 32;

template <typename T>
double pairwise_dot_impl(const T* a, const T* b, std::size_t n) {
    if (n <= kPairwiseBase) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_dot_impl(a, b, half) + pairwise_dot_impl(a + half, b + half, n - half);
}

template <typename T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
    if (a.size() != b.size()) {
        throw DimensionError("cosine_distance: dimensions differ (" + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()) + ")");
    }
    if (a.empty()) throw DimensionError("cosine_distance: empty vectors");
    const double aa = pairwise_dot_impl(a.data(), a.data(), a.size());
    const double bb = pairwise_dot_impl(b.data(), b.data(), b.size());
    if (!(aa > 0.0) || !(bb > 0.0)) throw ZeroNormError("cosine_distance: zero-norm vector");
    const double ab = pairwise_dot_impl(a.data(), b.data(), a.size());
    const double d = 1.0 - ab / (std::sqrt(aa) * std::sqrt(bb));
    return std::clamp(d, 0.0, 2.0);
}

void check_document(const std::vector<embedding::SentenceEmbeddings>& doc, const DsiConfig& config) {
    config.validate();
    if (doc.size() < static_cast<std::size_t>(config.min_sentences)) {
        throw DocumentTooShort("document has " + std::to_string(doc.size()) + " sentences, minimum is " +
                               std::to_string(config.min_sentences));
    }
    Eigen::Index dim = -1;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        for (int layer : config.layer_indices) {
            auto it = doc[i].per_layer.find(layer);
            if (it == doc[i].per_layer.end()) {
                throw DimensionError("sentence " + std::to_string(i) + " lacks layer " + std::to_string(layer));
            }
            if (it->second.rows() == 0) throw DimensionError("sentence " + std::to_string(i) + " has no tokens");
            if (dim >= 0 && it->second.cols() != dim) {
                throw DimensionError("sentence " + std::to_string(i) + " has inconsistent hidden_dim");
            }
            dim = it->second.cols();
        }
    }
}

DsiScore make_score(const std::vector<embedding::SentenceEmbeddings>& doc, const DsiConfig& config, double value,
                    std::size_t n_distances) {
    DsiScore s;
    s.value = std::clamp(value, 0.0, 2.0);
    s.n_sentences = doc.size();
    s.n_distances = n_distances;
    s.mode = config.mode;
    return s;
}

[[noreturn]] void rethrow_zero_norm(std::size_t i, std::size_t j, int k1, int k2) {
    throw ZeroNormError("zero-norm sentence vector in pair (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") layers (" + std::to_string(k1) + ", " + std::to_string(k2) + ")");
}

std::span<const float> row_of(const embedding::Matrix& m, Eigen::Index r) {
    return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

// Rows scaled to unit length in double precision; throws on a zero row.
Eigen::MatrixXd normalized_rows(const embedding::Matrix& m, std::size_t sentence) {
    Eigen::MatrixXd out = m.cast<double>();
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        const double norm = out.row(r).norm();
        if (!(norm > 0.0)) {
            throw ZeroNormError("zero-norm token row " + std::to_string(r) + " in sentence " + std::to_string(sentence));
        }
        out.row(r) /= norm;
    }
    return out;
}

}  // namespace

std::string_view to_string(DsiMode mode) {
    switch (mode) {
        case DsiMode::Pooled: return "pooled";
        case DsiMode::TokenPairs: return "token_pairs";
        case DsiMode::SingleVector: return "single_vector";
    }
    return "unknown";
}

DsiMode dsi_mode_from_string(std::string_view name) {
    if (name == "pooled") return DsiMode::Pooled;
    if (name == "token_pairs") return DsiMode::TokenPairs;
    if (name == "single_vector") return DsiMode::SingleVector;
    throw ConfigError("unknown DSI mode: " + std::string(name));
}

std::string_view to_string(Backend backend) { return backend == Backend::Reference ? "reference" : "blocked"; }

Backend backend_from_string(std::string_view name) {
    if (name == "reference") return Backend::Reference;
    if (name == "blocked") return Backend::Blocked;
    throw ConfigError("unknown DSI backend: " + std::string(name));
}

void DsiConfig::validate() const {
    if (min_sentences < 2) throw PreconditionError("min_sentences must be at least 2");
    if (mode == DsiMode::SingleVector) throw PreconditionError("single_vector mode has its own entry point");
    if (layer_indices.empty()) throw PreconditionError("layer_indices must not be empty");
    for (std::size_t i = 1; i < layer_indices.size(); ++i) {
        if (layer_indices[i] <= layer_indices[i - 1]) throw PreconditionError("layer_indices must be strictly increasing");
    }
}

double pairwise_dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("pairwise_dot: dimensions differ");
    return pairwise_dot_impl(a.data(), b.data(), a.size());
}

double cosine_distance(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }
double cosine_distance(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }

Eigen::VectorXd pool_sentence(const embedding::SentenceEmbeddings& emb, int layer) {
    auto it = emb.per_layer.find(layer);
    if (it == emb.per_layer.end()) throw PreconditionError("pool_sentence: layer " + std::to_string(layer) + " missing");
    const auto& m = it->second;
    if (m.rows() == 0 || m.cols() == 0) throw PreconditionError("pool_sentence: empty matrix");
    Eigen::VectorXd out(m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        double s = 0.0;
        for (Eigen::Index r = 0; r < m.rows(); ++r) s += static_cast<double>(m(r, c));
        out(c) = s / static_cast<double>(m.rows());
    }
    return out;
}

double stable_mean(std::vector<double>& distances) {
    if (distances.empty()) throw PreconditionError("mean of no distances");
    std::sort(distances.begin(), distances.end());
    double sum = 0.0, comp = 0.0;
    for (double d : distances) {
        const double t = sum + d;
        comp += std::abs(sum) >= std::abs(d) ? (sum - t) + d : (d - t) + sum;
        sum = t;
    }
    return (sum + comp) / static_cast<double>(distances.size());
}

DsiScore dsi_multilayer(const std::vector<embedding::SentenceEmbeddings>& doc, const DsiConfig& config) {
    check_document(doc, config);
    const std::size_t n = doc.size();
    const auto& layers = config.layer_indices;
    std::vector<double> distances;

    if (config.mode == DsiMode::Pooled) {
        std::vector<std::vector<Eigen::VectorXd>> pooled(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (int k : layers) pooled[i].push_back(pool_sentence(doc[i], k));
        }
        distances.reserve(layers.size() * layers.size() * n * (n - 1) / 2);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                for (std::size_t a = 0; a < layers.size(); ++a) {
                    for (std::size_t b = 0; b < layers.size(); ++b) {
                        const auto& u = pooled[i][a];
                        const auto& v = pooled[j][b];
                        try {
                            distances.push_back(cosine_distance(std::span<const double>(u.data(), u.size()),
                                                                std::span<const double>(v.data(), v.size())));
                        } catch (const ZeroNormError&) {
                            rethrow_zero_norm(i, j, layers[a], layers[b]);
                        }
                    }
                }
            }
        }
        const auto count = distances.size();
        return make_score(doc, config, stable_mean(distances), count);
    }

    std::vector<double> contributions;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (int k1 : layers) {
                for (int k2 : layers) {
                    const auto& mi = doc[i].per_layer.at(k1);
                    const auto& mj = doc[j].per_layer.at(k2);
                    distances.clear();
                    for (Eigen::Index t = 0; t < mi.rows(); ++t) {
                        for (Eigen::Index u = 0; u < mj.rows(); ++u) {
                            try {
                                distances.push_back(cosine_distance(row_of(mi, t), row_of(mj, u)));
                            } catch (const ZeroNormError&) {
                                rethrow_zero_norm(i, j, k1, k2);
                            }
                        }
                    }
                    contributions.push_back(stable_mean(distances));
                }
            }
        }
    }
    const auto count = contributions.size();
    return make_score(doc, config, stable_mean(contributions), count);
}

DsiScore dsi_multilayer_blocked(const std::vector<embedding::SentenceEmbeddings>& doc, const DsiConfig& config,
                                double sentinel_offset) {
    check_document(doc, config);
    const std::size_t n = doc.size();
    const auto& layers = config.layer_indices;
    const auto L = layers.size();
    std::vector<double> distances;

    if (config.mode == DsiMode::Pooled) {
        const Eigen::Index dim = doc[0].hidden_dim();
        std::vector<Eigen::MatrixXd> unit(L, Eigen::MatrixXd(static_cast<Eigen::Index>(n), dim));
        for (std::size_t a = 0; a < L; ++a) {
            for (std::size_t i = 0; i < n; ++i) {
                const Eigen::VectorXd p = pool_sentence(doc[i], layers[a]);
                const double norm = std::sqrt(pairwise_dot_impl(p.data(), p.data(), static_cast<std::size_t>(p.size())));
                if (!(norm > 0.0)) {
                    throw ZeroNormError("zero-norm pooled vector for sentence " + std::to_string(i) + " layer " +
                                        std::to_string(layers[a]));
                }
                unit[a].row(static_cast<Eigen::Index>(i)) = p.transpose() / norm;
            }
        }
        distances.reserve(L * L * n * (n - 1) / 2);
        for (std::size_t a = 0; a < L; ++a) {
            for (std::size_t b = 0; b < L; ++b) {
                const Eigen::MatrixXd gram = unit[a] * unit[b].transpose();
                for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
                    for (Eigen::Index j = i + 1; j < static_cast<Eigen::Index>(n); ++j) {
                        distances.push_back(std::clamp(1.0 - gram(i, j), 0.0, 2.0));
                    }
                }
            }
        }
        if (!distances.empty()) distances.front() += sentinel_offset;
        const auto count = distances.size();
        return make_score(doc, config, stable_mean(distances), count);
    }

    std::vector<std::vector<Eigen::MatrixXd>> unit(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int k : layers) unit[i].push_back(normalized_rows(doc[i].per_layer.at(k), i));
    }
    std::vector<double> contributions;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t a = 0; a < L; ++a) {
                for (std::size_t b = 0; b < L; ++b) {
                    const Eigen::MatrixXd gram = unit[i][a] * unit[j][b].transpose();
                    distances.resize(static_cast<std::size_t>(gram.size()));
                    for (Eigen::Index e = 0; e < gram.size(); ++e) {
                        distances[static_cast<std::size_t>(e)] = std::clamp(1.0 - gram.data()[e], 0.0, 2.0);
                    }
                    contributions.push_back(stable_mean(distances));
                }
            }
        }
    }
    if (!contributions.empty()) contributions.front() += sentinel_offset;
    const auto count = contributions.size();
    return make_score(doc, config, stable_mean(contributions), count);
}

DsiScore dsi_single_vector(const std::vector<std::vector<double>>& vectors, int min_sentences) {
    if (min_sentences < 2) throw PreconditionError("min_sentences must be at least 2");
    if (vectors.size() < static_cast<std::size_t>(min_sentences)) {
        throw DocumentTooShort("document has " + std::to_string(vectors.size()) + " vectors, minimum is " +
                               std::to_string(min_sentences));
    }
    std::vector<double> distances;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i + 1; j < vectors.size(); ++j) {
            try {
                distances.push_back(cosine_distance(std::span<const double>(vectors[i]), std::span<const double>(vectors[j])));
            } catch (const ZeroNormError&) {
                throw ZeroNormError("zero-norm vector in pair (" + std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }
    DsiScore s;
    s.n_sentences = vectors.size();
    s.n_distances = distances.size();
    s.mode = DsiMode::SingleVector;
    s.value = std::clamp(stable_mean(distances), 0.0, 2.0);
    return s;
}

DsiPath reference_path() {
    return [](const std::vector<embedding::SentenceEmbeddings>& doc, const DsiConfig& c) { return dsi_multilayer(doc, c); };
}

DsiPath blocked_path(double sentinel_offset) {
    return [sentinel_offset](const std::vector<embedding::SentenceEmbeddings>& doc, const DsiConfig& c) {
        return dsi_multilayer_blocked(doc, c, sentinel_offset);
    };
}

double backend_equivalence(const std::vector<std::vector<embedding::SentenceEmbeddings>>& docs,
                           const DsiConfig& config, const DsiPath& path_a, const DsiPath& path_b) {
    double worst = 0.0;
    for (const auto& doc : docs) {
        worst = std::max(worst, std::abs(path_a(doc, config).value - path_b(doc, config).value));
    }
    return worst;
}

}  // namespace scidsi::dsi
