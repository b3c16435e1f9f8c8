#pragma once

#include "scidsi/dsi/dsi.hpp"
#include "scidsi/embedding/embeddings.hpp"
#include "scidsi/textprep/wordpiece.hpp"

#include <optional>
#include <string>
#include <vector>

namespace scidsi::dsi {

struct BatchDocument {
    std::string record_id;
    std::vector<textprep::TokenizedSentence> sentences;
};

struct BatchRow {
    std::string record_id;
    std::optional<DsiScore> score;
    std::string error;  // "<Kind>: <message>" when score is empty
};

struct BatchResult {
    std::vector<BatchRow> rows;  // input order; on abort only finished documents
    bool aborted = false;
    std::string abort_reason;
    std::size_t processed = 0;
};

struct BatchOptions {
    Backend backend = Backend::Blocked;
    unsigned parallelism = 1;
};

/// Embeds and scores every document. Per-document errors land in the row;
/// a TransportError (the provider's retries already spent) stops the batch
/// and returns what finished.
BatchResult dsi_batch(const std::vector<BatchDocument>& docs, embedding::EmbeddingProvider& provider,
                      const DsiConfig& config, const BatchOptions& options = {});

std::string to_csv(const std::vector<BatchRow>& rows);
std::string to_jsonl(const std::vector<BatchRow>& rows);

/// Parses the CSV written by to_csv. Only record_id and dsi are required;
/// a missing one raises SchemaError naming it. Bad values raise ParseError.
std::vector<BatchRow> rows_from_csv(std::istream& in);

}  // namespace scidsi::dsi
