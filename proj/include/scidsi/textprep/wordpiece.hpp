#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace scidsi::textprep {

/// Word-piece vocabulary: one token per line, line index = id.
class Vocabulary {
public:
    static constexpr std::string_view kContinuationPrefix = "##";
    static constexpr std::string_view kCls = "[CLS]";
    static constexpr std::string_view kSep = "[SEP]";
    static constexpr std::string_view kUnk = "[UNK]";

    /// Throws ParseError on duplicate tokens or missing specials.
    static Vocabulary load(std::istream& in, std::size_t max_input_tokens = 512);
    static Vocabulary load(const std::filesystem::path& path, std::size_t max_input_tokens = 512);

    /// Returns -1 for unknown tokens.
    std::int32_t id_of(const std::string& token) const;
    /// Throws PreconditionError for an id out of range.
    const std::string& token_of(std::int32_t id) const;

    std::int32_t cls_id() const { return cls_; }
    std::int32_t sep_id() const { return sep_; }
    std::int32_t unk_id() const { return unk_; }
    std::size_t size() const { return tokens_.size(); }
    std::size_t max_input_tokens() const { return max_input_tokens_; }

    /// SHA-256 of the vocabulary lines joined by '\n'.
    const std::string& fingerprint() const { return fingerprint_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::int32_t> ids_;
    std::int32_t cls_ = -1, sep_ = -1, unk_ = -1;
    std::size_t max_input_tokens_ = 512;
    std::string fingerprint_;
};

struct TokenizedSentence {
    std::vector<std::string> tokens;
    std::vector<std::int32_t> ids;
    bool truncated = false;

    bool operator==(const TokenizedSentence&) const = default;
};

/// Cased basic tokenization (control characters dropped, whitespace and
/// punctuation split, CJK characters isolated) followed by greedy
/// longest-prefix word-piece matching. Words longer than 100 code points or
/// with an unmatchable remainder become [UNK]. Content beyond
/// max_input_tokens - 2 is cut from the tail. Throws EmptySentence when no
/// content token remains.
TokenizedSentence tokenize(std::string_view sentence, const Vocabulary& vocab);

/// Basic (pre-word-piece) split only; exposed for tests.
std::vector<std::string> basic_tokenize(std::string_view text);

}  // namespace scidsi::textprep
