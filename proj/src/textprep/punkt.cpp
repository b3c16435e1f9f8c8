#include "scidsi/textprep/punkt.hpp"

#include "scidsi/errors.hpp"
#include "scidsi/util/unicode.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <unordered_map>

namespace scidsi::textprep {

namespace {

constexpr std::string_view kNumberType = "##number##";

bool in_set(char c, std::string_view set) { return set.find(c) != std::string_view::npos; }

// Byte length of the whitespace code point at `pos`, or 0.
std::size_t whitespace_len(std::string_view text, std::size_t pos) {
    if (pos >= text.size()) return 0;
    const auto c = static_cast<unsigned char>(text[pos]);
    if (c < 0x80) return (c == ' ' || (c >= '\t' && c <= '\r') || (c >= 0x1c && c <= 0x1f)) ? 1 : 0;
    std::size_t p = pos;
    const char32_t cp = unicode::next_code_point(text, p);
    if (cp == unicode::kInvalid) return 0;
    return (unicode::is_whitespace(cp) || cp == 0x85 || cp == 0x2028 || cp == 0x2029) ? p - pos : 0;
}

std::size_t code_point_len(std::string_view text, std::size_t pos) {
    std::size_t p = pos;
    unicode::next_code_point(text, p);
    return p - pos;
}

std::size_t code_point_count(std::string_view text) {
    std::size_t n = 0;
    for (std::size_t p = 0; p < text.size(); ++n) unicode::next_code_point(text, p);
    return n;
}

char32_t first_code_point(std::string_view text) {
    if (text.empty()) return 0;
    std::size_t p = 0;
    return unicode::next_code_point(text, p);
}

// Word-character excluding digits (letters and underscore).
bool is_word_letter(char32_t cp) { return cp == U'_' || unicode::is_alpha(cp); }

bool matches_number(std::string_view s) {
    std::size_t i = 0;
    if (i < s.size() && s[i] == '-') ++i;
    if (i < s.size() && (s[i] == '.' || s[i] == ',')) ++i;
    if (i >= s.size() || s[i] < '0' || s[i] > '9') return false;
    for (++i; i < s.size(); ++i) {
        const char c = s[i];
        if (!((c >= '0' && c <= '9') || c == ',' || c == '.' || c == '-')) return false;
    }
    return true;
}

struct Token {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string tok;
    std::string type;
    bool parastart = false;
    bool linestart = false;
    bool sentbreak = false;
    bool abbr = false;
    bool ellipsis = false;

    bool period_final() const { return !tok.empty() && tok.back() == '.'; }

    std::string type_no_period() const {
        if (type.size() > 1 && type.back() == '.') return type.substr(0, type.size() - 1);
        return type;
    }

    std::string type_no_sentperiod() const { return sentbreak ? type_no_period() : type; }

    bool first_upper() const { return unicode::is_upper(first_code_point(tok)); }
    bool first_lower() const { return unicode::is_lower(first_code_point(tok)); }

    bool is_number() const { return std::string_view(type).starts_with(kNumberType); }

    bool is_ellipsis() const {
        if (tok.size() < 2) return false;
        for (char c : tok) {
            if (c != '.') return false;
        }
        return true;
    }

    // One letter followed by a period.
    bool is_initial() const {
        if (tok.size() < 2 || tok.back() != '.') return false;
        std::size_t p = 0;
        const char32_t cp = unicode::next_code_point(tok, p);
        return p == tok.size() - 1 && is_word_letter(cp);
    }

    bool is_alpha() const {
        if (tok.empty()) return false;
        for (std::size_t p = 0; p < tok.size();) {
            if (!is_word_letter(unicode::next_code_point(tok, p))) return false;
        }
        return true;
    }

    bool is_non_punct() const {
        for (std::size_t p = 0; p < type.size();) {
            if (is_word_letter(unicode::next_code_point(type, p))) return true;
        }
        return false;
    }
};

constexpr std::string_view kWordStartExcluded = "(\"`{[:;&#*@)}]-,";
constexpr std::string_view kNonWord = ")\";}]*:@'({[!?";

// Length of a multi-character punctuation run at `pos` ("--", "..", ". . ."), or 0.
std::size_t multichar_len(std::string_view text, std::size_t pos) {
    if (pos + 1 >= text.size()) return 0;
    const char c = text[pos];
    if ((c == '-' || c == '.') && text[pos + 1] == c) {
        std::size_t q = pos;
        while (q < text.size() && text[q] == c) ++q;
        return q - pos;
    }
    if (c == '.') {
        std::size_t q = pos;
        int reps = 0;
        while (q + 1 < text.size() && text[q] == '.' && whitespace_len(text, q + 1) > 0) {
            q += 1 + whitespace_len(text, q + 1);
            ++reps;
        }
        if (reps >= 2 && q < text.size() && text[q] == '.') return q + 1 - pos;
    }
    return 0;
}

bool word_ends_before(std::string_view text, std::size_t q) {
    if (q >= text.size() || whitespace_len(text, q) > 0) return true;
    if (in_set(text[q], kNonWord) || multichar_len(text, q) > 0) return true;
    if (text[q] == ',') {
        const std::size_t r = q + 1;
        return r >= text.size() || whitespace_len(text, r) > 0 || in_set(text[r], kNonWord) ||
               multichar_len(text, r) > 0;
    }
    return false;
}

std::string make_type(std::string_view tok) {
    std::string lower = unicode::to_lower(tok);
    if (matches_number(lower)) return std::string(kNumberType);
    return lower;
}

std::vector<Token> word_tokenize(std::string_view text) {
    std::vector<Token> out;
    bool parastart = true;
    bool linestart = true;
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (text[pos] == '\n') {
            if (linestart && !out.empty()) parastart = true;
            linestart = true;
            ++pos;
            continue;
        }
        if (const auto ws = whitespace_len(text, pos); ws > 0) {
            pos += ws;
            continue;
        }
        std::size_t end;
        if (const auto mc = multichar_len(text, pos); mc > 0) {
            end = pos + mc;
        } else if (!in_set(text[pos], kWordStartExcluded)) {
            end = pos + code_point_len(text, pos);
            while (!word_ends_before(text, end)) end += code_point_len(text, end);
        } else {
            end = pos + code_point_len(text, pos);
        }
        Token t;
        t.start = pos;
        t.end = end;
        t.tok = std::string(text.substr(pos, end - pos));
        t.type = make_type(t.tok);
        t.parastart = parastart;
        t.linestart = linestart;
        parastart = false;
        linestart = false;
        out.push_back(std::move(t));
        pos = end;
    }
    return out;
}

void first_pass(std::vector<Token>& tokens, const std::set<std::string>& abbrevs) {
    for (auto& t : tokens) {
        if (t.tok == "." || t.tok == "?" || t.tok == "!") {
            t.sentbreak = true;
        } else if (t.is_ellipsis()) {
            t.ellipsis = true;
        } else if (t.period_final() && !std::string_view(t.tok).ends_with("..")) {
            const std::string stem = unicode::to_lower(std::string_view(t.tok).substr(0, t.tok.size() - 1));
            const auto dash = stem.rfind('-');
            const std::string last = dash == std::string::npos ? stem : stem.substr(dash + 1);
            if (abbrevs.contains(stem) || abbrevs.contains(last)) {
                t.abbr = true;
            } else {
                t.sentbreak = true;
            }
        }
    }
}

std::uint32_t ortho_of(const SegmenterState& state, const std::string& type) {
    auto it = state.ortho_context.find(type);
    return it == state.ortho_context.end() ? 0u : it->second;
}

enum class Tri { False, True, Unknown };

Tri ortho_heuristic(const Token& t, const SegmenterState& state) {
    if (t.tok.size() == 1 && in_set(t.tok[0], ";:,.!?")) return Tri::False;
    const auto ctx = ortho_of(state, t.type_no_sentperiod());
    if (t.first_upper() && (ctx & kAnyLower) && !(ctx & kMidUpper)) return Tri::True;
    if (t.first_lower() && ((ctx & kAnyUpper) || !(ctx & kBegLower))) return Tri::False;
    return Tri::Unknown;
}

void second_pass(std::vector<Token>& tokens, const SegmenterState& state) {
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        Token& t1 = tokens[i];
        const Token& t2 = tokens[i + 1];
        if (!t1.period_final()) continue;
        const std::string typ = t1.type_no_period();
        const std::string next_typ = t2.type_no_sentperiod();
        const bool initial = t1.is_initial();

        if (state.collocation_set.contains({typ, next_typ})) {
            t1.sentbreak = false;
            t1.abbr = true;
            continue;
        }
        if ((t1.abbr || t1.ellipsis) && !initial) {
            if (ortho_heuristic(t2, state) == Tri::True) {
                t1.sentbreak = true;
                continue;
            }
            if (t2.first_upper() && state.sentence_starters.contains(next_typ)) {
                t1.sentbreak = true;
                continue;
            }
        }
        if (initial || typ == kNumberType) {
            const Tri starter = ortho_heuristic(t2, state);
            if (starter == Tri::False) {
                t1.sentbreak = false;
                t1.abbr = true;
                continue;
            }
            if (starter == Tri::Unknown && initial && t2.first_upper() &&
                !(ortho_of(state, next_typ) & kAnyLower)) {
                t1.sentbreak = false;
                t1.abbr = true;
            }
        }
    }
}

void collect_ortho(const std::vector<Token>& tokens, std::map<std::string, std::uint32_t>& ortho) {
    enum class Ctx { Initial, Internal, Unknown };
    Ctx context = Ctx::Internal;
    for (const auto& t : tokens) {
        if (t.parastart && context != Ctx::Unknown) context = Ctx::Initial;
        if (t.linestart && context == Ctx::Internal) context = Ctx::Unknown;
        std::uint32_t flag = 0;
        if (t.first_upper()) {
            flag = context == Ctx::Initial ? kBegUpper : context == Ctx::Internal ? kMidUpper : kUnkUpper;
        } else if (t.first_lower()) {
            flag = context == Ctx::Initial ? kBegLower : context == Ctx::Internal ? kMidLower : kUnkLower;
        }
        if (flag != 0) ortho[t.type_no_sentperiod()] |= flag;
        if (t.sentbreak) {
            context = (t.is_number() || t.is_initial()) ? Ctx::Unknown : Ctx::Initial;
        } else if (t.ellipsis || t.abbr) {
            context = Ctx::Unknown;
        } else {
            context = Ctx::Internal;
        }
    }
}

double dunning_log_likelihood(double count_a, double count_b, double count_ab, double n) {
    const double p1 = count_b / n;
    const double p2 = 0.99;
    const double null_hypo = count_ab * std::log(p1) + (count_a - count_ab) * std::log(1.0 - p1);
    const double alt_hypo = count_ab * std::log(p2) + (count_a - count_ab) * std::log(1.0 - p2);
    return -2.0 * (null_hypo - alt_hypo);
}

double col_log_likelihood(double count_a, double count_b, double count_ab, double n) {
    const double p = count_b / n;
    const double p1 = count_ab / count_a;
    const double p2 = n - count_a == 0.0 ? 1.0 : (count_b - count_ab) / (n - count_a);
    const bool p_ok = p > 0.0 && p < 1.0;
    const double s1 = p_ok ? count_ab * std::log(p) + (count_a - count_ab) * std::log(1.0 - p) : 0.0;
    const double s2 = p_ok ? (count_b - count_ab) * std::log(p) +
                                 (n - count_a - count_b + count_ab) * std::log(1.0 - p)
                           : 0.0;
    const double s3 = (count_a == count_ab || p1 <= 0.0 || p1 >= 1.0)
                          ? 0.0
                          : count_ab * std::log(p1) + (count_a - count_ab) * std::log(1.0 - p1);
    const double s4 = (count_b == count_ab || p2 <= 0.0 || p2 >= 1.0)
                          ? 0.0
                          : (count_b - count_ab) * std::log(p2) +
                                (n - count_a - count_b + count_ab) * std::log(1.0 - p2);
    return -2.0 * (s1 + s2 - s3 - s4);
}

// Drops the last code point.
std::string drop_last_char(const std::string& s) {
    if (s.empty()) return s;
    std::size_t last = 0;
    for (std::size_t p = 0; p < s.size();) {
        last = p;
        unicode::next_code_point(s, p);
    }
    return s.substr(0, last);
}

using FreqDist = std::unordered_map<std::string, std::uint64_t>;

std::uint64_t count_of(const FreqDist& fd, const std::string& key) {
    auto it = fd.find(key);
    return it == fd.end() ? 0 : it->second;
}

}  // namespace

nlohmann::json to_json(const SegmenterState& state) {
    nlohmann::json colloc = nlohmann::json::array();
    for (const auto& [a, b] : state.collocation_set) colloc.push_back({a, b});
    nlohmann::json ortho = nlohmann::json::object();
    for (const auto& [k, v] : state.ortho_context) ortho[k] = v;
    return {{"format_version", SegmenterState::kFormatVersion},
            {"abbreviation_set", state.abbreviation_set},
            {"collocation_set", colloc},
            {"sentence_starters", state.sentence_starters},
            {"ortho_context", ortho},
            {"training_token_count", state.training_token_count}};
}

SegmenterState segmenter_state_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format_version").get<int>() != SegmenterState::kFormatVersion) {
            throw SchemaError("unsupported segmenter state version");
        }
        SegmenterState s;
        for (const auto& a : j.at("abbreviation_set")) s.abbreviation_set.insert(a.get<std::string>());
        for (const auto& c : j.at("collocation_set")) {
            if (!c.is_array() || c.size() != 2) throw SchemaError("collocation entries must be pairs");
            s.collocation_set.emplace(c[0].get<std::string>(), c[1].get<std::string>());
        }
        for (const auto& a : j.at("sentence_starters")) s.sentence_starters.insert(a.get<std::string>());
        for (const auto& [k, v] : j.at("ortho_context").items()) s.ortho_context[k] = v.get<std::uint32_t>();
        s.training_token_count = j.at("training_token_count").get<std::uint64_t>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("segmenter state: ") + e.what());
    }
}

SegmenterState train_segmenter(const std::vector<std::string>& texts, const TrainingOptions& options) {
    if (texts.empty()) throw EmptyCorpus("cannot train a segmenter on an empty corpus");

    SegmenterState state;
    FreqDist type_fdist;
    std::uint64_t n_tokens = 0;
    std::uint64_t num_period_toks = 0;
    for (const auto& text : texts) {
        for (const auto& t : word_tokenize(text)) {
            ++type_fdist[t.type];
            ++n_tokens;
            num_period_toks += t.period_final();
        }
    }
    state.training_token_count = n_tokens;
    if (n_tokens == 0) return state;
    const double N = static_cast<double>(n_tokens);

    for (const auto& [typ_full, count] : type_fdist) {
        if (typ_full.size() < 2 || typ_full.back() != '.') continue;
        const std::string typ = typ_full.substr(0, typ_full.size() - 1);
        bool has_letter = false;
        for (std::size_t p = 0; p < typ.size();) has_letter |= is_word_letter(unicode::next_code_point(typ, p));
        if (!has_letter || typ == kNumberType) continue;

        const double num_periods = static_cast<double>(std::count(typ.begin(), typ.end(), '.') + 1);
        const double num_nonperiods = static_cast<double>(code_point_count(typ)) - num_periods + 1.0;
        const double with_period = static_cast<double>(count);
        const double without_period = static_cast<double>(count_of(type_fdist, typ));
        const double ll = dunning_log_likelihood(with_period + without_period,
                                                 static_cast<double>(num_period_toks), with_period, N);
        const double score = ll * std::exp(-num_nonperiods) * num_periods *
                             std::pow(num_nonperiods, -without_period);
        if (score >= options.abbrev_threshold) state.abbreviation_set.insert(typ);
    }

    std::uint64_t sentbreak_count = 0;
    FreqDist starter_fdist;
    std::map<std::pair<std::string, std::string>, std::uint64_t> colloc_fdist;
    for (const auto& text : texts) {
        auto tokens = word_tokenize(text);
        first_pass(tokens, state.abbreviation_set);
        collect_ortho(tokens, state.ortho_context);
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const Token& t1 = tokens[i];
            sentbreak_count += t1.sentbreak;
            if (i + 1 >= tokens.size() || !t1.period_final()) continue;
            const Token& t2 = tokens[i + 1];
            if (t1.sentbreak && !(t1.is_number() || t1.is_initial()) && t2.is_alpha()) ++starter_fdist[t2.type];
            if (t1.sentbreak && (t1.is_number() || t1.is_initial()) && t1.is_non_punct() && t2.is_non_punct()) {
                ++colloc_fdist[{t1.type_no_period(), t2.type_no_sentperiod()}];
            }
        }
    }

    // Rare abbreviations need the complete orthographic table, so they get their own pass.
    std::set<std::string> rare;
    for (const auto& text : texts) {
        auto tokens = word_tokenize(text);
        first_pass(tokens, state.abbreviation_set);
        for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
            const Token& t1 = tokens[i];
            const Token& t2 = tokens[i + 1];
            if (!t1.period_final() || t1.abbr || !t1.sentbreak) continue;
            const std::string typ = t1.type_no_sentperiod();
            const auto count = count_of(type_fdist, typ) + count_of(type_fdist, drop_last_char(typ));
            if (state.abbreviation_set.contains(typ) || count >= static_cast<std::uint64_t>(options.abbrev_backoff)) {
                continue;
            }
            if (!t2.tok.empty() && in_set(t2.tok[0], ",:;")) {
                rare.insert(typ);
            } else if (t2.first_lower()) {
                const auto ctx = ortho_of(state, t2.type_no_sentperiod());
                if ((ctx & kBegUpper) && !(ctx & kMidUpper)) rare.insert(typ);
            }
        }
    }
    state.abbreviation_set.insert(rare.begin(), rare.end());

    if (sentbreak_count > 0) {
        const double breaks = static_cast<double>(sentbreak_count);
        for (const auto& [typ, at_break] : starter_fdist) {
            const double typ_count =
                static_cast<double>(count_of(type_fdist, typ) + count_of(type_fdist, typ + "."));
            if (typ_count < static_cast<double>(at_break)) continue;
            const double ll = col_log_likelihood(breaks, typ_count, static_cast<double>(at_break), N);
            if (ll >= options.sent_starter_threshold && N / breaks > typ_count / static_cast<double>(at_break)) {
                state.sentence_starters.insert(typ);
            }
        }
    }

    for (const auto& [pair, col_count] : colloc_fdist) {
        const auto& [typ1, typ2] = pair;
        if (state.sentence_starters.contains(typ2)) continue;
        const double c1 = static_cast<double>(count_of(type_fdist, typ1) + count_of(type_fdist, typ1 + "."));
        const double c2 = static_cast<double>(count_of(type_fdist, typ2) + count_of(type_fdist, typ2 + "."));
        const double cc = static_cast<double>(col_count);
        if (c1 > 1 && c2 > 1 && static_cast<double>(options.min_collocation_freq) < cc && cc <= std::min(c1, c2)) {
            const double ll = col_log_likelihood(c1, c2, cc, N);
            if (ll >= options.collocation_threshold && N / c1 > c2 / cc) state.collocation_set.insert(pair);
        }
    }
    return state;
}

std::vector<SentenceSpan> segment(std::string_view text, const SegmenterState& state) {
    auto tokens = word_tokenize(text);
    first_pass(tokens, state.abbreviation_set);
    second_pass(tokens, state);

    auto is_closer = [](const Token& t) { return t.tok.size() == 1 && in_set(t.tok[0], ")]}\"'"); };
    auto is_opener = [](const Token& t) { return t.tok.size() == 1 && in_set(t.tok[0], "([{\"'`"); };

    std::vector<SentenceSpan> spans;
    if (tokens.empty()) return spans;
    std::size_t span_start = tokens.front().start;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!tokens[i].sentbreak) continue;
        std::size_t end = tokens[i].end;
        std::size_t j = i + 1;
        while (j < tokens.size() && tokens[j].start == end && is_closer(tokens[j])) end = tokens[j++].end;
        if (j >= tokens.size() || tokens[j].start == end) continue;
        std::size_t k = j;
        while (k + 1 < tokens.size() && is_opener(tokens[k]) && tokens[k + 1].start == tokens[k].end) ++k;
        const char32_t cp = first_code_point(tokens[k].tok);
        if (!(unicode::is_upper(cp) || unicode::is_digit(cp))) continue;
        spans.push_back({span_start, end, std::string(text.substr(span_start, end - span_start))});
        span_start = tokens[j].start;
        i = j - 1;
    }
    const std::size_t end = tokens.back().end;
    spans.push_back({span_start, end, std::string(text.substr(span_start, end - span_start))});
    return spans;
}

namespace {

bool has_terminal_punctuation(std::string_view title) {
    const auto last = title.find_last_not_of(" \t\r\n");
    return last != std::string_view::npos && in_set(title[last], ".!?");
}

std::string_view separator_for(std::string_view title) {
    return has_terminal_punctuation(title) ? " " : ". ";
}

}  // namespace

std::string document_text(std::string_view title, std::string_view abstract) {
    std::string out(title);
    out += separator_for(title);
    out += abstract;
    return out;
}

SegmentedDocument segment_document(std::string_view title, std::string_view abstract,
                                   const SegmenterState& state) {
    SegmentedDocument doc;
    doc.text = document_text(title, abstract);
    const auto first = title.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos) {
        const auto last = title.find_last_not_of(" \t\r\n");
        doc.spans.push_back({first, last + 1, std::string(title.substr(first, last + 1 - first))});
    }
    const std::size_t offset = title.size() + separator_for(title).size();
    for (auto span : segment(abstract, state)) {
        span.start += offset;
        span.end += offset;
        doc.spans.push_back(std::move(span));
    }
    return doc;
}

}  // namespace scidsi::textprep
