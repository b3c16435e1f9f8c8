#include "scidsi/corpus/summary.hpp"

#include "scidsi/stats/descriptive.hpp"
#include "scidsi/util/csv.hpp"
#include "scidsi/util/format.hpp"

#include <algorithm>

namespace scidsi::corpus {

namespace {

// Inputs arrive sorted so sums do not depend on record order.
AuthorStats author_stats(const std::vector<double>& v) {
    AuthorStats s;
    for (double x : v) s.zeros += x == 0.0;
    if (v.empty()) return s;
    s.mean = stats::mean(v);
    s.median = stats::median(v);
    s.max = stats::max(v);
    if (v.size() >= 2) s.sd = stats::sample_sd(v);
    return s;
}

CitationStats citation_stats(const std::vector<double>& v) {
    CitationStats s;
    s.n_present = v.size();
    for (double x : v) s.zeros += x == 0.0;
    if (v.empty()) return s;
    s.mean = stats::mean(v);
    s.median = stats::median(v);
    if (v.size() >= 2) s.sd = stats::sample_sd(v);
    s.zeros_percent = 100.0 * static_cast<double>(s.zeros) / static_cast<double>(v.size());
    return s;
}

SummaryRow build_row(std::string name, const std::vector<const BiblioRecord*>& group) {
    SummaryRow row;
    row.field = std::move(name);
    row.n = group.size();
    std::vector<double> authors;
    std::array<std::vector<double>, 3> cits;
    for (const auto* r : group) {
        authors.push_back(r->author_count);
        if (r->cit3) cits[0].push_back(static_cast<double>(*r->cit3));
        if (r->cit5) cits[1].push_back(static_cast<double>(*r->cit5));
        if (r->cit_total) cits[2].push_back(static_cast<double>(*r->cit_total));
    }
    std::sort(authors.begin(), authors.end());
    row.authors = author_stats(authors);
    for (std::size_t w = 0; w < 3; ++w) {
        std::sort(cits[w].begin(), cits[w].end());
        row.citations[w] = citation_stats(cits[w]);
    }
    return row;
}

}  // namespace

CorpusSummary summarize(const std::vector<BiblioRecord>& records) {
    CorpusSummary summary;
    std::vector<const BiblioRecord*> all;
    for (const auto& r : records) {
        all.push_back(&r);
        summary.unmapped += !r.field.has_value();
    }
    for (auto field : kAllFields) {
        std::vector<const BiblioRecord*> group;
        for (const auto* r : all) {
            if (r->field == field) group.push_back(r);
        }
        summary.rows.push_back(build_row(std::string(to_string(field)), group));
    }
    summary.rows.push_back(build_row("All", all));
    return summary;
}

std::string to_csv(const CorpusSummary& summary) {
    std::vector<std::string> header = {"field", "n", "authors_mean", "authors_median", "authors_max",
                                       "authors_sd", "authors_zeros"};
    for (const char* w : {"cit3", "cit5", "cit_total"}) {
        for (const char* col : {"n", "mean", "median", "sd", "zeros", "zeros_percent"}) {
            header.push_back(std::string(w) + "_" + col);
        }
    }
    std::string out = csv::join(header) + "\n";
    for (const auto& row : summary.rows) {
        std::vector<std::string> f = {row.field,
                                      std::to_string(row.n),
                                      util::format_optional(row.authors.mean),
                                      util::format_optional(row.authors.median),
                                      util::format_optional(row.authors.max),
                                      util::format_optional(row.authors.sd),
                                      std::to_string(row.authors.zeros)};
        for (const auto& c : row.citations) {
            f.push_back(std::to_string(c.n_present));
            f.push_back(util::format_optional(c.mean));
            f.push_back(util::format_optional(c.median));
            f.push_back(util::format_optional(c.sd));
            f.push_back(std::to_string(c.zeros));
            f.push_back(util::format_optional(c.zeros_percent));
        }
        out += csv::join(f) + "\n";
    }
    return out;
}

}  // namespace scidsi::corpus
