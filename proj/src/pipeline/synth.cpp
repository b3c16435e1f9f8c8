#include "scidsi/pipeline/synth.hpp"

#include "scidsi/embedding/synthetic.hpp"
#include "scidsi/errors.hpp"

#include <cmath>

namespace scidsi::pipeline {

namespace {

constexpr const char* kWords[] = {
#include "synthetic_words.inc"
};

class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(embedding::mix64(seed ^ 0x5eed5eedULL)) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return embedding::mix64(state_);
    }

    // Lemire's multiply-shift; the tiny bias is irrelevant here.
    std::size_t below(std::size_t n) {
        return static_cast<std::size_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::size_t>(hi - lo + 1))); }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Geometric count with the given mean.
    int geometric(double mean) {
        const double p = 1.0 / (mean + 1.0);
        return static_cast<int>(std::floor(std::log1p(-unit()) / std::log1p(-p)));
    }

private:
    std::uint64_t state_;
};

std::string capitalize(std::string w) {
    if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
    return w;
}

std::string make_title(Stream& rng) {
    const int n = rng.between(6, 14);
    std::string out;
    for (int i = 0; i < n; ++i) {
        std::string w = kWords[rng.below(std::size(kWords))];
        if (i == 0) w = capitalize(w);
        if (!out.empty()) out += ' ';
        out += w;
    }
    return out;
}

std::string make_abstract(Stream& rng, int target_spaces) {
    std::string out;
    int spaces = -1;
    while (spaces < target_spaces) {
        const int len = std::min(rng.between(8, 30), target_spaces - spaces);
        for (int i = 0; i < len; ++i) {
            std::string w = kWords[rng.below(std::size(kWords))];
            if (i == 0) w = capitalize(w);
            if (!out.empty()) out += ' ';
            out += w;
            ++spaces;
            if (i + 1 < len && rng.below(25) == 0) out += ',';
        }
        out += '.';
    }
    return out;
}

}  // namespace

std::span<const char* const> synthetic_words() { return kWords; }

std::vector<corpus::BiblioRecord> synthetic_corpus(const corpus::FieldMap& map, const SynthOptions& o) {
    if (map.size() == 0) throw PreconditionError("synthetic_corpus: empty field map");
    if (o.first_year > o.last_year || o.min_spaces < 0 || o.min_spaces > o.max_spaces) {
        throw PreconditionError("synthetic_corpus: bad year or space range");
    }
    std::vector<std::string> subjects;
    for (const auto& [subject, field] : map.entries()) subjects.push_back(subject);

    std::vector<corpus::BiblioRecord> out;
    out.reserve(o.n_records);
    Stream rng(o.seed);
    for (std::size_t i = 0; i < o.n_records; ++i) {
        corpus::BiblioRecord r;
        r.record_id = "SYN" + std::to_string(1000000 + i).substr(1);
        if (rng.below(5) != 0) r.doi = "10.5555/syn." + std::to_string(o.seed) + "." + std::to_string(i);
        r.title = make_title(rng);
        r.abstract = make_abstract(rng, rng.between(o.min_spaces, o.max_spaces));
        r.pub_year = rng.between(o.first_year, o.last_year);
        r.author_count = rng.unit() < o.zero_author_rate ? 0 : 1 + rng.geometric(3.5);
        r.primary_subject =
            rng.unit() < o.unmapped_rate ? "Unlisted Subject " + std::to_string(rng.below(3)) : subjects[rng.below(subjects.size())];
        const double impact = 0.5 + 2.0 * rng.unit();
        const std::int64_t c3 = rng.unit() < 0.2 ? 0 : rng.geometric(4.0 * impact);
        const std::int64_t c5 = c3 + rng.geometric(3.0 * impact);
        const std::int64_t total = c5 + rng.geometric(6.0 * impact);
        r.cit3 = c3;
        r.cit5 = c5;
        r.cit_total = total;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace scidsi::pipeline
