#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spscan/corpus.hpp"
#include "spscan/embedding.hpp"
#include "spscan/metrics.hpp"

namespace spscan {

// Retrieval units within one document: either its sentences, or fixed
// word-count chunks built greedily from whole sentences.
struct RetrievalUnit {
    int64_t unit_index = 0;
    std::vector<int64_t> sentence_indices;  // document sentences in the unit
    std::string text;
};

// Greedy chunks of about `target_words` words; a chunk always ends on a
// sentence boundary and every sentence lands in exactly one chunk.
std::vector<RetrievalUnit> make_word_chunks(const Document& doc, int64_t target_words = 300);

std::vector<RetrievalUnit> make_sentence_units(const Document& doc);

enum class BaselineMode { chunks5, sentences50 };

std::string to_string(BaselineMode mode);
BaselineMode baseline_mode_from_string(std::string_view s);

inline int64_t baseline_k(BaselineMode mode) {
    return mode == BaselineMode::chunks5 ? 5 : 50;
}

// Okapi BM25 with k1 = 1.2, b = 0.75 over the document's own units; idf is
// the Robertson form with +0.5 smoothing, clamped at zero. Query terms are
// lowercased and stopwords dropped. Ties and all-zero scores fall back to
// unit order.
struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

RankedRun bm25_rank(std::string_view query, const std::vector<RetrievalUnit>& units,
                    const std::string& query_id, const Bm25Params& params = {});

// Cosine ranking under the shared embedding interface, same unit sets and
// tie rules as BM25.
RankedRun embedding_rank(std::string_view query, const std::vector<RetrievalUnit>& units,
                         const std::string& query_id, EmbeddingProvider& embedder);

bool is_stopword(std::string_view lower_word);

}  // namespace spscan
