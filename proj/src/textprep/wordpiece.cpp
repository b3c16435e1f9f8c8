#include "scidsi/textprep/wordpiece.hpp"

#include "scidsi/errors.hpp"
#include "scidsi/util/format.hpp"
#include "scidsi/util/unicode.hpp"

#include <fstream>

namespace scidsi::textprep {

namespace {

constexpr std::size_t kMaxCharsPerWord = 100;

}  // namespace

Vocabulary Vocabulary::load(std::istream& in, std::size_t max_input_tokens) {
    if (!in) throw IoError("vocabulary stream is not readable");
    if (max_input_tokens < 3) throw PreconditionError("max_input_tokens must be at least 3");
    Vocabulary v;
    v.max_input_tokens_ = max_input_tokens;
    std::string line;
    std::string joined;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto id = static_cast<std::int32_t>(v.tokens_.size());
        if (!v.ids_.emplace(line, id).second) {
            throw ParseError("duplicate vocabulary token '" + line + "' at line " + std::to_string(id + 1));
        }
        if (id > 0) joined.push_back('\n');
        joined += line;
        v.tokens_.push_back(line);
    }
    v.cls_ = v.id_of(std::string(kCls));
    v.sep_ = v.id_of(std::string(kSep));
    v.unk_ = v.id_of(std::string(kUnk));
    if (v.cls_ < 0 || v.sep_ < 0 || v.unk_ < 0) throw ParseError("vocabulary lacks [CLS], [SEP] or [UNK]");
    v.fingerprint_ = util::sha256_hex(joined);
    return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path, std::size_t max_input_tokens) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open vocabulary: " + path.string());
    return load(in, max_input_tokens);
}

std::int32_t Vocabulary::id_of(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? -1 : it->second;
}

const std::string& Vocabulary::token_of(std::int32_t id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
        throw PreconditionError("token id out of range: " + std::to_string(id));
    }
    return tokens_[static_cast<std::size_t>(id)];
}

std::vector<std::string> basic_tokenize(std::string_view text) {
    // Clean and isolate CJK characters, then split on whitespace and punctuation.
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) out.push_back(std::move(current));
        current.clear();
    };
    for (std::size_t p = 0; p < text.size();) {
        const char32_t cp = unicode::next_code_point(text, p);
        if (cp == 0 || cp == 0xFFFD || cp == unicode::kInvalid || unicode::is_control(cp)) continue;
        if (unicode::is_whitespace(cp)) {
            flush();
        } else if (unicode::is_cjk(cp) || unicode::is_punctuation(cp)) {
            flush();
            unicode::append_utf8(current, cp);
            flush();
        } else {
            unicode::append_utf8(current, cp);
        }
    }
    flush();
    return out;
}

TokenizedSentence tokenize(std::string_view sentence, const Vocabulary& vocab) {
    TokenizedSentence out;
    out.tokens.emplace_back(Vocabulary::kCls);
    out.ids.push_back(vocab.cls_id());
    const std::size_t max_content = vocab.max_input_tokens() - 2;
    std::size_t content = 0;

    auto push = [&](const std::string& tok, std::int32_t id) {
        if (content == max_content) {
            out.truncated = true;
            return false;
        }
        out.tokens.push_back(tok);
        out.ids.push_back(id);
        ++content;
        return true;
    };

    for (const auto& word : basic_tokenize(sentence)) {
        std::vector<std::size_t> boundaries;  // byte offset of each code point
        for (std::size_t p = 0; p < word.size();) {
            boundaries.push_back(p);
            unicode::next_code_point(word, p);
        }
        const std::size_t n_chars = boundaries.size();
        boundaries.push_back(word.size());

        std::vector<std::pair<std::string, std::int32_t>> pieces;
        bool bad = n_chars > kMaxCharsPerWord;
        std::size_t start = 0;
        while (!bad && start < n_chars) {
            std::size_t end = n_chars;
            std::int32_t found = -1;
            std::string piece;
            while (start < end) {
                piece = word.substr(boundaries[start], boundaries[end] - boundaries[start]);
                if (start > 0) piece.insert(0, Vocabulary::kContinuationPrefix);
                found = vocab.id_of(piece);
                if (found >= 0) break;
                --end;
            }
            if (found < 0) {
                bad = true;
                break;
            }
            pieces.emplace_back(std::move(piece), found);
            start = end;
        }
        if (bad) {
            if (!push(std::string(Vocabulary::kUnk), vocab.unk_id())) break;
            continue;
        }
        bool full = false;
        for (const auto& [piece, id] : pieces) {
            if (!push(piece, id)) {
                full = true;
                break;
            }
        }
        if (full) break;
    }
    if (content == 0) throw EmptySentence("sentence has no tokens");
    out.tokens.emplace_back(Vocabulary::kSep);
    out.ids.push_back(vocab.sep_id());
    return out;
}

}  // namespace scidsi::textprep
