#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spscan/annotate.hpp"
#include "spscan/records.hpp"

namespace spscan {

// Synthetic corpora with a controlled retrieval signal. Documents are filler
// text from a fixed invented lexicon; each carries "beaconNN" needle tokens,
// and queries reference the paired "anchorNN" key. Anchor tokens never occur
// in documents and filler words never occur in queries, so lexical retrieval
// has no usable term overlap and must fall back to position order, while a
// trained scorer can exploit the anchor/beacon pairing.

struct NeedleCorpusConfig {
    int64_t n_docs = 50;
    int64_t sentences_per_doc = 250;
    int64_t words_per_sentence = 8;
    int64_t n_keys = 8;
    int64_t needles_per_doc = 1;  // sentences carrying the document's key
    uint64_t seed = 1;
    std::string doc_prefix = "doc";
    // inclusive sentence-index placement range for needles; defaults to the
    // whole document
    std::function<std::pair<int64_t, int64_t>(int64_t doc_index)> needle_range;
};

struct FixtureCorpus {
    std::vector<Document> docs;
    std::vector<QueryRecord> queries;      // one per document
    std::vector<Judgment> judgments;       // relevant = needle sentence indices
    std::vector<TrainingExample> examples; // labels = needle sentences
    std::vector<AnnotateItem> items;       // gold answer = the needle token
};

FixtureCorpus make_needle_corpus(const NeedleCorpusConfig& cfg);

// Long-range variant: an early marker sentence names the document's key,
// and after `separation_tokens` of filler a block of payload candidates
// names one key each. Only the candidate matching the marker is relevant,
// so scoring in chunks shorter than the separation cannot identify it.
struct LongRangeConfig {
    int64_t n_docs = 40;
    int64_t n_keys = 8;
    int64_t separation_tokens = 1200;
    int64_t n_candidates = 6;
    int64_t lead_sentences = 5;
    int64_t tail_sentences = 5;
    int64_t words_per_sentence = 8;
    uint64_t seed = 2;
    std::string doc_prefix = "lr";
};

FixtureCorpus make_longrange_corpus(const LongRangeConfig& cfg);

// Plain filler document of roughly n_tokens word tokens; latency sweeps.
Document make_filler_document(const std::string& doc_id, int64_t n_tokens, uint64_t seed);

// kNumWidth-digit zero-padded key names used in fixture text.
std::string needle_token(int64_t key);
std::string anchor_token(int64_t key);

// All parameters drawn randomly (head included); gradient checks need a
// model without the zero-head training init.
ScanModel random_model(const ModelDims& dims, Vocabulary vocab, uint64_t seed,
                       double scale = 0.5);

}  // namespace spscan
