#pragma once

#include "scidsi/embedding/embeddings.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace scidsi::embedding {

inline constexpr std::uint16_t kCacheFormatVersion = 1;

struct CacheHeader {
    std::uint16_t format_version = kCacheFormatVersion;
    std::string model_id;
    std::vector<int> layer_indices;
    int hidden_dim = 0;
    std::uint64_t document_count = 0;
};

/// Streams document blocks to `<path>.tmp`; finish() writes the index footer,
/// patches the document count into the header and renames over `path`.
/// Output bytes depend only on the inputs.
class CacheWriter {
public:
    CacheWriter(std::filesystem::path path, const std::string& model_id, std::vector<int> layer_indices,
                int hidden_dim);
    ~CacheWriter();
    CacheWriter(const CacheWriter&) = delete;
    CacheWriter& operator=(const CacheWriter&) = delete;

    /// Throws PreconditionError on duplicate ids, IntegrityError on shape problems.
    void add(const std::string& doc_id, const std::vector<SentenceEmbeddings>& sentences);
    void finish();

    std::uint64_t document_count() const { return index_.size(); }

private:
    std::filesystem::path path_;
    std::filesystem::path tmp_path_;
    std::ofstream out_;
    CacheHeader header_;
    std::size_t header_reserved_ = 0;
    std::vector<std::pair<std::string, std::uint64_t>> index_;
    std::map<std::string, std::size_t> seen_;
    bool finished_ = false;
};

void write_cache(const std::filesystem::path& path,
                 const std::vector<std::pair<std::string, std::vector<SentenceEmbeddings>>>& docs,
                 const ProviderSpec& spec);

/// Random access by document id. Each read() opens its own stream, so one
/// reader can serve concurrent callers.
class CacheReader {
public:
    /// Throws CorruptCache on a damaged file, IoError if it cannot be opened.
    explicit CacheReader(std::filesystem::path path);

    const CacheHeader& header() const { return header_; }
    bool contains(const std::string& doc_id) const { return index_.contains(doc_id); }
    std::vector<std::string> doc_ids() const;

    /// Throws CacheSpecMismatch when model, layers or (non-zero) hidden_dim differ.
    void require_matches(const ProviderSpec& spec) const;

    /// Throws NotFound or CorruptCache.
    std::vector<SentenceEmbeddings> read(const std::string& doc_id) const;

private:
    std::filesystem::path path_;
    CacheHeader header_;
    std::uint64_t file_size_ = 0;
    std::uint64_t footer_offset_ = 0;
    std::map<std::string, std::uint64_t> index_;
};

std::vector<SentenceEmbeddings> read_cache(const std::filesystem::path& path, const std::string& doc_id,
                                           const ProviderSpec& spec);

class CacheProvider : public EmbeddingProvider {
public:
    /// spec.endpoint_or_path names the cache file; the header must match spec.
    explicit CacheProvider(ProviderSpec spec);

    const ProviderSpec& spec() const override { return spec_; }
    int hidden_dim() const override { return reader_.header().hidden_dim; }
    std::vector<SentenceEmbeddings> embed(const std::string& doc_id,
                                          const std::vector<textprep::TokenizedSentence>& sentences) override;

private:
    ProviderSpec spec_;
    CacheReader reader_;
};

}  // namespace scidsi::embedding
