#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spscan/model.hpp"

namespace spscan {

enum class ScoreMode { full, sliding, chunk_sentence, chunk_fixed };

std::string to_string(ScoreMode mode);
ScoreMode score_mode_from_string(std::string_view s);

struct WindowConfig {
    ScoreMode mode = ScoreMode::full;
    int64_t window_tokens = 120000;  // document tokens per window, sliding mode
    int64_t stride_tokens = 60000;
    int64_t chunk_tokens = 1024;  // chunk_fixed mode
};

struct TokenRange {
    int64_t begin = 0;
    int64_t end = 0;  // exclusive

    bool operator==(const TokenRange&) const = default;
};

// Window start offsets over a document of doc_tokens tokens. Windows cover
// every position; interior positions fall in multiple windows when
// stride < window.
std::vector<TokenRange> make_windows(int64_t doc_tokens, int64_t window_tokens,
                                     int64_t stride_tokens);

// Scores sentences under the given mode. The query prefix is prepended to
// every window or chunk; recurrent state never crosses a chunk boundary.
// In sliding mode a sentence scored by several windows gets the arithmetic
// mean of its logits, accumulated in window order.
SentenceScores score_windowed(const ScanModel& model, const TokenizedInput& input,
                              const WindowConfig& cfg);

// Top-k sentence indices by logit (ties broken toward earlier sentences),
// returned in document order.
std::vector<int64_t> select_top_k(const SentenceScores& scores, int64_t k);

struct AssembledContext {
    std::vector<int64_t> sentence_indices;  // document order, post-truncation
    std::string text;
    int64_t token_count = 0;
    bool truncated = false;      // budget forced dropping sentences
    bool budget_exhausted = false;  // nothing fit under the budget
};

// Joins the selected sentences in document order. With a token budget,
// whole sentences are dropped from the end until the context fits.
AssembledContext assemble_context(const Document& doc, std::span<const int64_t> selected,
                                  std::optional<int64_t> token_budget);

}  // namespace spscan
