#include "scidsi/embedding/cache.hpp"

#include "scidsi/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstring>

namespace scidsi::embedding {

namespace {

constexpr char kMagic[4] = {'D', 'S', 'I', 'C'};
constexpr std::size_t kHeaderSlack = 24;

template <typename T>
T to_le(T v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        T out{};
        auto* src = reinterpret_cast<const unsigned char*>(&v);
        auto* dst = reinterpret_cast<unsigned char*>(&out);
        for (std::size_t i = 0; i < sizeof(T); ++i) dst[i] = src[sizeof(T) - 1 - i];
        return out;
    }
}

template <typename T>
void put(std::ostream& out, T v) {
    v = to_le(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_floats(std::ostream& out, const Matrix& m) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(float)));
    } else {
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            std::uint32_t bits;
            std::memcpy(&bits, m.data() + i, 4);
            put(out, bits);
        }
    }
}

std::string header_json(const CacheHeader& h) {
    nlohmann::json j{{"document_count", h.document_count},
                     {"format_version", h.format_version},
                     {"hidden_dim", h.hidden_dim},
                     {"layer_indices", h.layer_indices},
                     {"model_id", h.model_id}};
    return j.dump();
}

// Bounds-checked reads over an istream; any shortfall is CorruptCache.
class BlockReader {
public:
    BlockReader(std::istream& in, std::uint64_t limit, const std::string& what)
        : in_(in), limit_(limit), what_(what) {}

    template <typename T>
    T get() {
        T v{};
        bytes(reinterpret_cast<char*>(&v), sizeof(T));
        return to_le(v);
    }

    void bytes(char* dst, std::uint64_t n) {
        const auto pos = static_cast<std::uint64_t>(in_.tellg());
        if (!in_ || pos + n > limit_) throw CorruptCache(what_ + ": truncated data");
        in_.read(dst, static_cast<std::streamsize>(n));
        if (!in_) throw CorruptCache(what_ + ": truncated data");
    }

    std::string string(std::uint64_t max_len) {
        const auto n = get<std::uint32_t>();
        if (n > max_len) throw CorruptCache(what_ + ": implausible string length");
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }

private:
    std::istream& in_;
    std::uint64_t limit_;
    std::string what_;
};

}  // namespace

CacheWriter::CacheWriter(std::filesystem::path path, const std::string& model_id, std::vector<int> layer_indices,
                         int hidden_dim)
    : path_(std::move(path)) {
    ProviderSpec check;
    check.model_id = model_id;
    check.layer_indices = layer_indices;
    check.hidden_dim = hidden_dim;
    check.validate();
    if (hidden_dim < 1) throw PreconditionError("cache hidden_dim must be at least 1");
    header_.model_id = model_id;
    header_.layer_indices = std::move(layer_indices);
    header_.hidden_dim = hidden_dim;

    tmp_path_ = path_;
    tmp_path_ += ".tmp";
    out_.open(tmp_path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot create cache file: " + tmp_path_.string());
    out_.write(kMagic, 4);
    put(out_, header_.format_version);
    const std::string json = header_json(header_);
    header_reserved_ = json.size() + kHeaderSlack;
    out_ << json << std::string(kHeaderSlack, ' ') << '\n';
}

CacheWriter::~CacheWriter() {
    if (!finished_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(tmp_path_, ec);
    }
}

void CacheWriter::add(const std::string& doc_id, const std::vector<SentenceEmbeddings>& sentences) {
    if (finished_) throw PreconditionError("cache writer already finished");
    if (seen_.contains(doc_id)) throw PreconditionError("duplicate document id in cache: " + doc_id);
    for (const auto& s : sentences) {
        check_shape(s, header_.layer_indices, s.token_count(), header_.hidden_dim);
    }
    const auto offset = static_cast<std::uint64_t>(out_.tellp());
    put(out_, static_cast<std::uint32_t>(doc_id.size()));
    out_.write(doc_id.data(), static_cast<std::streamsize>(doc_id.size()));
    put(out_, static_cast<std::uint32_t>(sentences.size()));
    for (const auto& s : sentences) {
        for (int layer : header_.layer_indices) {
            const Matrix& m = s.per_layer.at(layer);
            put(out_, static_cast<std::uint32_t>(m.rows()));
            put_floats(out_, m);
        }
    }
    if (!out_) throw IoError("write failure in cache file: " + tmp_path_.string());
    seen_.emplace(doc_id, index_.size());
    index_.emplace_back(doc_id, offset);
}

void CacheWriter::finish() {
    if (finished_) return;
    const auto footer = static_cast<std::uint64_t>(out_.tellp());
    put(out_, static_cast<std::uint32_t>(index_.size()));
    for (const auto& [id, offset] : index_) {
        put(out_, static_cast<std::uint32_t>(id.size()));
        out_.write(id.data(), static_cast<std::streamsize>(id.size()));
        put(out_, offset);
    }
    put(out_, footer);

    header_.document_count = index_.size();
    std::string json = header_json(header_);
    if (json.size() > header_reserved_) throw IoError("cache header outgrew its reserved space");
    json.append(header_reserved_ - json.size(), ' ');
    out_.seekp(6);
    out_ << json;
    out_.close();
    if (!out_) throw IoError("write failure in cache file: " + tmp_path_.string());
    std::filesystem::rename(tmp_path_, path_);
    finished_ = true;
}

void write_cache(const std::filesystem::path& path,
                 const std::vector<std::pair<std::string, std::vector<SentenceEmbeddings>>>& docs,
                 const ProviderSpec& spec) {
    int dim = spec.hidden_dim;
    if (dim == 0 && !docs.empty() && !docs.front().second.empty()) {
        dim = static_cast<int>(docs.front().second.front().hidden_dim());
    }
    CacheWriter writer(path, spec.model_id, spec.layer_indices, dim);
    for (const auto& [id, sentences] : docs) writer.add(id, sentences);
    writer.finish();
}

CacheReader::CacheReader(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw IoError("cannot open cache file: " + path_.string());
    in.seekg(0, std::ios::end);
    file_size_ = static_cast<std::uint64_t>(in.tellg());
    in.seekg(0);
    const std::string what = "cache " + path_.string();
    BlockReader r(in, file_size_, what);

    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw CorruptCache(what + ": bad magic");
    header_.format_version = r.get<std::uint16_t>();
    if (header_.format_version != kCacheFormatVersion) {
        throw CorruptCache(what + ": unsupported format version " + std::to_string(header_.format_version));
    }
    std::string line;
    if (!std::getline(in, line)) throw CorruptCache(what + ": missing header");
    try {
        const auto j = nlohmann::json::parse(line);
        header_.model_id = j.at("model_id").get<std::string>();
        header_.layer_indices = j.at("layer_indices").get<std::vector<int>>();
        header_.hidden_dim = j.at("hidden_dim").get<int>();
        header_.document_count = j.at("document_count").get<std::uint64_t>();
        if (j.at("format_version").get<int>() != header_.format_version) {
            throw CorruptCache(what + ": header version disagrees with preamble");
        }
    } catch (const nlohmann::json::exception& e) {
        throw CorruptCache(what + ": bad header: " + e.what());
    }
    if (header_.hidden_dim < 1 || header_.layer_indices.empty()) throw CorruptCache(what + ": bad header values");

    const auto body_start = static_cast<std::uint64_t>(in.tellg());
    if (file_size_ < body_start + 12) throw CorruptCache(what + ": truncated footer");
    in.seekg(static_cast<std::streamoff>(file_size_ - 8));
    footer_offset_ = r.get<std::uint64_t>();
    if (footer_offset_ < body_start || footer_offset_ > file_size_ - 12) {
        throw CorruptCache(what + ": footer offset out of range");
    }
    in.seekg(static_cast<std::streamoff>(footer_offset_));
    BlockReader fr(in, file_size_ - 8, what);
    const auto count = fr.get<std::uint32_t>();
    if (count != header_.document_count) throw CorruptCache(what + ": index size disagrees with header");
    for (std::uint32_t i = 0; i < count; ++i) {
        auto id = fr.string(1u << 20);
        const auto offset = fr.get<std::uint64_t>();
        if (offset < body_start || offset >= footer_offset_) throw CorruptCache(what + ": block offset out of range");
        if (!index_.emplace(std::move(id), offset).second) throw CorruptCache(what + ": duplicate index entry");
    }
    if (static_cast<std::uint64_t>(in.tellg()) != file_size_ - 8) throw CorruptCache(what + ": trailing footer bytes");
}

std::vector<std::string> CacheReader::doc_ids() const {
    std::vector<std::pair<std::uint64_t, std::string>> by_offset;
    for (const auto& [id, off] : index_) by_offset.emplace_back(off, id);
    std::sort(by_offset.begin(), by_offset.end());
    std::vector<std::string> out;
    for (auto& [off, id] : by_offset) out.push_back(std::move(id));
    return out;
}

void CacheReader::require_matches(const ProviderSpec& spec) const {
    if (spec.model_id != header_.model_id) {
        throw CacheSpecMismatch("cache model_id '" + header_.model_id + "' does not match '" + spec.model_id + "'");
    }
    if (spec.layer_indices != header_.layer_indices) throw CacheSpecMismatch("cache layer_indices do not match");
    if (spec.hidden_dim != 0 && spec.hidden_dim != header_.hidden_dim) {
        throw CacheSpecMismatch("cache hidden_dim " + std::to_string(header_.hidden_dim) + " does not match " +
                                std::to_string(spec.hidden_dim));
    }
}

std::vector<SentenceEmbeddings> CacheReader::read(const std::string& doc_id) const {
    auto it = index_.find(doc_id);
    if (it == index_.end()) throw NotFound("document not in cache: " + doc_id);
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw IoError("cannot open cache file: " + path_.string());
    in.seekg(static_cast<std::streamoff>(it->second));
    const std::string what = "cache " + path_.string() + " document " + doc_id;
    BlockReader r(in, footer_offset_, what);
    if (r.string(1u << 20) != doc_id) throw CorruptCache(what + ": block id does not match index");
    const auto n_sentences = r.get<std::uint32_t>();
    const auto dim = static_cast<Eigen::Index>(header_.hidden_dim);
    std::vector<SentenceEmbeddings> out;
    for (std::uint32_t s = 0; s < n_sentences; ++s) {
        SentenceEmbeddings emb;
        emb.sentence_index = s;
        Eigen::Index tokens = -1;
        for (int layer : header_.layer_indices) {
            const auto rows = static_cast<Eigen::Index>(r.get<std::uint32_t>());
            if (tokens >= 0 && rows != tokens) throw CorruptCache(what + ": layers disagree on token count");
            tokens = rows;
            if (static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(dim) * 4 > footer_offset_) {
                throw CorruptCache(what + ": implausible token count");
            }
            Matrix m(rows, dim);
            r.bytes(reinterpret_cast<char*>(m.data()), static_cast<std::uint64_t>(m.size()) * 4);
            if constexpr (std::endian::native != std::endian::little) {
                for (Eigen::Index i = 0; i < m.size(); ++i) {
                    std::uint32_t bits;
                    std::memcpy(&bits, m.data() + i, 4);
                    bits = to_le(bits);
                    std::memcpy(m.data() + i, &bits, 4);
                }
            }
            emb.per_layer.emplace(layer, std::move(m));
        }
        out.push_back(std::move(emb));
    }
    return out;
}

std::vector<SentenceEmbeddings> read_cache(const std::filesystem::path& path, const std::string& doc_id,
                                           const ProviderSpec& spec) {
    CacheReader reader(path);
    reader.require_matches(spec);
    return reader.read(doc_id);
}

CacheProvider::CacheProvider(ProviderSpec spec) : spec_(std::move(spec)), reader_(spec_.endpoint_or_path) {
    spec_.validate();
    reader_.require_matches(spec_);
}

std::vector<SentenceEmbeddings> CacheProvider::embed(const std::string& doc_id,
                                                     const std::vector<textprep::TokenizedSentence>&) {
    return reader_.read(doc_id);
}

}  // namespace scidsi::embedding
