#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace spscan {

enum class ModelFamily { scanner, transformer };

std::string to_string(ModelFamily f);
ModelFamily model_family_from_string(std::string_view s);

struct ModelSpecInfo {
    ModelFamily family = ModelFamily::scanner;
    double param_count = 0.0;  // total parameters
    int64_t n_layers = 0;      // transformer attention accounting
    int64_t d_model = 0;
};

struct WorkloadSpec {
    std::vector<int64_t> doc_tokens;  // tokens per document, one entry each
    int64_t batch_size = 1;
    bool length_bucketing = false;  // sort by length before batching
    bool padding = false;           // count padded positions as processed
};

// Tokens actually pushed through the model: sum of lengths, or with padding
// on, sum over batches of batch_size * max_length_in_batch.
int64_t processed_tokens(const WorkloadSpec& workload);

// Dense-layer cost: 2 * params * processed_tokens.
double flops_linear(const ModelSpecInfo& spec, const WorkloadSpec& workload);

// Attention cost: 4 * len^2 * d_model * n_layers per sequence. Sequences
// longer than `window` are processed as sliding windows of `window` tokens
// with the given stride, each window paying its own quadratic term.
double flops_attention(const ModelSpecInfo& spec, const WorkloadSpec& workload,
                       int64_t window = 120000, int64_t stride = 60000);

struct ThroughputStats {
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double p95_ms = 0.0;
    int64_t repeats = 0;
    std::vector<double> samples_ms;
};

// Wall-clock stats for `runnable` (one full document pass) after discarding
// warmup runs. The workload must already be resident; nothing here touches
// the filesystem.
ThroughputStats measure_throughput(const std::function<void()>& runnable, int64_t warmup,
                                   int64_t repeats);

}  // namespace spscan
