#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spscan/records.hpp"
#include "spscan/window.hpp"

namespace spscan {

enum class AblationAxis { context_mode, chunk_position, train_length_mix };

std::string to_string(AblationAxis axis);
AblationAxis ablation_axis_from_string(std::string_view s);

struct AblationInputs {
    // evaluation corpus, shared across variants
    const std::vector<Document>* eval_docs = nullptr;
    const std::vector<QueryRecord>* queries = nullptr;
    const std::vector<Judgment>* judgments = nullptr;
    int64_t k = 1;

    // context_mode: a trained model scored under each mode
    const ScanModel* model = nullptr;

    // training axes: records are filtered per variant, then a fresh model is
    // trained with the same recipe and seed and evaluated on the corpus above
    const std::vector<SynthRecord>* synth = nullptr;
    const std::vector<Document>* synth_docs = nullptr;
    TrainConfig train_config;
    ModelDims dims;  // vocab_size is derived per variant
    int64_t context_pad = 40;
    uint64_t seed = 0;
};

struct AblationRow {
    std::string variant;
    std::string metric;
    double value = 0.0;
    int64_t n = 0;  // evaluated queries (or trained examples for *_count rows)
};

struct AblationReport {
    std::string axis;
    std::vector<AblationRow> rows;
    std::vector<std::string> ordering;  // variants sorted by metric, best first
};

// context_mode variants: score modes ("full", "sliding", "chunk_sentence",
// "chunk_1024"). chunk_position variants: percent ranges like "0-33" that
// both chunks' midpoints must fall in. train_length_mix variants: "+"-joined
// buckets of "2k" (≤3000 tokens), "5k" (≤7500), "10k" (rest); every variant
// trains on the same total token budget, capped by the smallest mix.
// A variant that selects nothing is an error naming the variant.
AblationReport run_ablation(AblationAxis axis, const std::vector<std::string>& variants,
                            const AblationInputs& inputs);

}  // namespace spscan
