#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spscan/corpus.hpp"
#include "spscan/llm_client.hpp"
#include "spscan/metrics.hpp"

namespace spscan {

struct AnnotateItem {
    std::string query_id;
    std::string doc_id;
    std::string query;
    std::string gold_answer;
};

struct AnnotateConfig {
    int64_t window_sentences = 20;
    int64_t expanded_window_sentences = 200;
    int retries = 3;
};

// Answer comparison: lowercase, punctuation stripped, whitespace collapsed.
std::string normalize_answer(std::string_view s);

// Two-pass annotation. Pass 1 marks relevant sentences in small windows and
// is validated by answering the question from the marked sentences alone.
// Failures are re-annotated with expanded windows and validated once more.
// Every item ends in exactly one status: validated_pass1, validated_pass2,
// discarded (both validations failed), or errored (the model never produced
// usable output for some window).
std::vector<Judgment> annotate_validate(const std::vector<AnnotateItem>& items,
                                        const std::vector<Document>& docs,
                                        LlmClient& annotator, LlmClient& answerer,
                                        const AnnotateConfig& cfg = {});

}  // namespace spscan
