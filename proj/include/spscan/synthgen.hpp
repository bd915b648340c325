#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spscan/corpus.hpp"
#include "spscan/embedding.hpp"
#include "spscan/llm_client.hpp"
#include "spscan/train.hpp"

namespace spscan {

struct SentenceRange {
    int64_t begin = 0;  // document sentence index
    int64_t end = 0;    // exclusive

    int64_t size() const { return end - begin; }
    bool operator==(const SentenceRange&) const = default;
};

struct SynthRecord {
    std::string doc_id;
    std::string strategy;  // "chunk" | "pair" | "link"
    std::string question;
    SentenceRange chunk_a;
    std::optional<SentenceRange> chunk_b;
    std::vector<int64_t> labeled_sentences;  // document sentence indices, sorted
    std::optional<std::string> connection;
};

struct SynthConfig {
    int64_t min_subseq_tokens = 2000;
    int64_t max_subseq_tokens = 10000;
    int64_t chunk_sentences = 20;
    int64_t context_sentences = 200;  // link-strategy discovery window
    int retries = 3;
    uint64_t seed = 0;
};

// Sentence-aligned working slice whose token count lands in
// [min_subseq_tokens, max_subseq_tokens]. Documents at or under the minimum
// are returned whole; nullopt when even one sentence exceeds the maximum.
std::optional<SentenceRange> sample_subsequence(const Document& doc, const SynthConfig& cfg,
                                                std::mt19937_64& rng);

struct SynthSkip {
    std::string doc_id;
    std::string strategy;
    int64_t record_index = 0;
    std::string reason;
};

struct SynthBatch {
    std::vector<SynthRecord> records;
    std::vector<SynthSkip> skipped;
};

// Generates per_doc records per document. Each record gets its own rng
// stream keyed by (seed, doc_id, strategy, index), so output is independent
// of document processing order. Malformed model output is retried up to
// cfg.retries times, then the record is skipped with the reason logged.
SynthBatch generate_synth(const std::vector<Document>& docs, std::string_view strategy,
                          int64_t per_doc, LlmClient& llm, EmbeddingProvider& embedder,
                          const SynthConfig& cfg);

struct DecontamRow {
    int64_t record_index = 0;
    std::string doc_id;
    double overlap = 0.0;
};

struct DecontamResult {
    std::vector<SynthRecord> kept;
    std::vector<DecontamRow> dropped;
};

// Drops records whose chunk sentences overlap the test corpus in more than
// `threshold` of cases (strict inequality; exactly at threshold is kept).
// Sentences match on whitespace-normalized exact text.
DecontamResult decontaminate(const std::vector<SynthRecord>& records,
                             const std::vector<Document>& docs,
                             const std::vector<std::string>& test_sentences,
                             double threshold = 0.01);

// Training view of a record: the document sliced to the chunks plus
// `context_pad` sentences on each side, labels rebased onto the slice.
struct SynthTrainingView {
    Document doc;
    TrainingExample example;
};

SynthTrainingView synth_to_example(const SynthRecord& record, const Document& doc,
                                   int64_t context_pad = 40);

}  // namespace spscan
