#include "spscan/window.hpp"

#include <algorithm>
#include <functional>

namespace spscan {

std::string to_string(ScoreMode mode) {
    switch (mode) {
        case ScoreMode::full: return "full";
        case ScoreMode::sliding: return "sliding";
        case ScoreMode::chunk_sentence: return "chunk_sentence";
        case ScoreMode::chunk_fixed: return "chunk_1024";
    }
    fail("unknown score mode");
}

ScoreMode score_mode_from_string(std::string_view s) {
    if (s == "full") return ScoreMode::full;
    if (s == "sliding") return ScoreMode::sliding;
    if (s == "chunk_sentence") return ScoreMode::chunk_sentence;
    if (s == "chunk_1024" || s == "chunk_fixed") return ScoreMode::chunk_fixed;
    fail("unknown score mode: " + std::string(s));
}

std::vector<TokenRange> make_windows(int64_t doc_tokens, int64_t window_tokens,
                                     int64_t stride_tokens) {
    if (doc_tokens <= 0) fail("make_windows: empty document");
    if (window_tokens <= 0 || stride_tokens <= 0)
        fail("make_windows: window and stride must be positive");
    if (stride_tokens > window_tokens)
        fail("make_windows: stride " + std::to_string(stride_tokens) + " exceeds window " +
             std::to_string(window_tokens) + ", positions would go unscored");
    std::vector<TokenRange> out;
    for (int64_t start = 0;; start += stride_tokens) {
        int64_t end = std::min(doc_tokens, start + window_tokens);
        out.push_back({start, end});
        if (end >= doc_tokens) break;
    }
    return out;
}

namespace {

// Runs the model over query prefix + one span of document tokens and reads
// logits for the sentences whose final token lies inside the span.
void score_span(const ScanModel& model, const TokenizedInput& input, TokenRange span,
                const std::function<void(size_t sentence, double logit)>& emit) {
    std::vector<int32_t> tokens(input.tokens.begin(), input.tokens.begin() + input.query_len);
    tokens.insert(tokens.end(), input.tokens.begin() + input.query_len + span.begin,
                  input.tokens.begin() + input.query_len + span.end);
    std::vector<double> logits = forward_logits(model, tokens);
    for (size_t i = 0; i < input.eos_indices.size(); ++i) {
        int64_t doc_pos = input.eos_indices[i] - input.query_len;
        if (doc_pos < span.begin || doc_pos >= span.end) continue;
        emit(i, logits[static_cast<size_t>(input.query_len + (doc_pos - span.begin))]);
    }
}

}  // namespace

SentenceScores score_windowed(const ScanModel& model, const TokenizedInput& input,
                              const WindowConfig& cfg) {
    if (cfg.mode == ScoreMode::full) return score_sentences(model, input);

    int64_t doc_tokens = input.total_tokens() - input.query_len;
    if (doc_tokens <= 0) fail("score_windowed: no document tokens after the query prefix");

    SentenceScores out;
    out.doc_id = input.doc_id;
    out.logits.assign(input.eos_indices.size(), 0.0);

    if (cfg.mode == ScoreMode::sliding) {
        std::vector<int64_t> count(input.eos_indices.size(), 0);
        // window order is fixed, so the running sums are deterministic
        for (TokenRange span : make_windows(doc_tokens, cfg.window_tokens, cfg.stride_tokens))
            score_span(model, input, span, [&](size_t i, double logit) {
                out.logits[i] += logit;
                ++count[i];
            });
        for (size_t i = 0; i < out.logits.size(); ++i) {
            if (count[i] == 0)
                fail("sentence " + std::to_string(i) + " of doc '" + input.doc_id +
                     "' covered by no window");
            out.logits[i] /= static_cast<double>(count[i]);
        }
        return out;
    }

    // chunk modes: state resets at every chunk boundary
    std::vector<TokenRange> chunks;
    if (cfg.mode == ScoreMode::chunk_sentence) {
        int64_t prev = 0;
        for (int64_t eos : input.eos_indices) {
            chunks.push_back({prev, eos - input.query_len + 1});
            prev = eos - input.query_len + 1;
        }
    } else {
        if (cfg.chunk_tokens <= 0) fail("score_windowed: chunk_tokens must be positive");
        for (int64_t start = 0; start < doc_tokens; start += cfg.chunk_tokens)
            chunks.push_back({start, std::min(doc_tokens, start + cfg.chunk_tokens)});
    }

    std::vector<bool> seen(input.eos_indices.size(), false);
    for (TokenRange span : chunks)
        score_span(model, input, span, [&](size_t i, double logit) {
            out.logits[i] = logit;
            seen[i] = true;
        });
    for (size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            fail("sentence " + std::to_string(i) + " of doc '" + input.doc_id +
                 "' missing from every chunk");
    return out;
}

std::vector<int64_t> select_top_k(const SentenceScores& scores, int64_t k) {
    if (k <= 0) fail("select_top_k: k must be positive");
    std::vector<int64_t> order(scores.logits.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int64_t>(i);
    std::sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
        double la = scores.logits[static_cast<size_t>(a)];
        double lb = scores.logits[static_cast<size_t>(b)];
        return la != lb ? la > lb : a < b;
    });
    order.resize(std::min<size_t>(order.size(), static_cast<size_t>(k)));
    std::sort(order.begin(), order.end());
    return order;
}

AssembledContext assemble_context(const Document& doc, std::span<const int64_t> selected,
                                  std::optional<int64_t> token_budget) {
    std::vector<int64_t> indices(selected.begin(), selected.end());
    std::sort(indices.begin(), indices.end());
    for (int64_t i : indices)
        if (i < 0 || i >= doc.sentence_count())
            fail("assemble_context: sentence index " + std::to_string(i) + " out of range");

    AssembledContext out;
    if (token_budget) {
        int64_t total = 0;
        size_t keep = 0;
        for (; keep < indices.size(); ++keep) {
            int64_t n = count_word_tokens(doc.sentence_text(indices[keep]));
            if (total + n > *token_budget) break;
            total += n;
        }
        out.truncated = keep < indices.size();
        out.budget_exhausted = keep == 0 && !indices.empty();
        indices.resize(keep);
        out.token_count = total;
    }

    out.sentence_indices = indices;
    for (int64_t i : indices) {
        if (!out.text.empty()) out.text += " ";
        out.text += std::string(doc.sentence_text(i));
    }
    if (!token_budget) out.token_count = count_word_tokens(out.text);
    return out;
}

}  // namespace spscan
