#include "spscan/perf.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "spscan/common.hpp"
#include "spscan/window.hpp"

namespace spscan {

std::string to_string(ModelFamily f) {
    return f == ModelFamily::scanner ? "scanner" : "transformer";
}

ModelFamily model_family_from_string(std::string_view s) {
    if (s == "scanner") return ModelFamily::scanner;
    if (s == "transformer") return ModelFamily::transformer;
    fail("unknown model family: " + std::string(s));
}

int64_t processed_tokens(const WorkloadSpec& workload) {
    if (workload.batch_size <= 0) fail("processed_tokens: batch_size must be positive");
    for (int64_t t : workload.doc_tokens)
        if (t <= 0) fail("processed_tokens: non-positive document length");
    if (!workload.padding) {
        int64_t sum = 0;
        for (int64_t t : workload.doc_tokens) sum += t;
        return sum;
    }
    std::vector<int64_t> lens = workload.doc_tokens;
    if (workload.length_bucketing) std::sort(lens.begin(), lens.end());
    int64_t total = 0;
    for (size_t i = 0; i < lens.size(); i += static_cast<size_t>(workload.batch_size)) {
        size_t end = std::min(lens.size(), i + static_cast<size_t>(workload.batch_size));
        int64_t max_len = 0;
        for (size_t j = i; j < end; ++j) max_len = std::max(max_len, lens[j]);
        total += max_len * static_cast<int64_t>(end - i);
    }
    return total;
}

double flops_linear(const ModelSpecInfo& spec, const WorkloadSpec& workload) {
    if (spec.param_count <= 0.0) fail("flops_linear: param_count must be positive");
    return 2.0 * spec.param_count * static_cast<double>(processed_tokens(workload));
}

double flops_attention(const ModelSpecInfo& spec, const WorkloadSpec& workload, int64_t window,
                       int64_t stride) {
    if (spec.family != ModelFamily::transformer)
        fail("flops_attention: attention cost applies to transformers only");
    if (spec.n_layers <= 0 || spec.d_model <= 0)
        fail("flops_attention: n_layers and d_model must be positive");
    double total = 0.0;
    for (int64_t len : workload.doc_tokens) {
        if (len <= 0) fail("flops_attention: non-positive document length");
        std::vector<TokenRange> spans;
        if (len > window)
            spans = make_windows(len, window, stride);
        else
            spans = {{0, len}};
        for (const TokenRange& span : spans) {
            double l = static_cast<double>(span.end - span.begin);
            total += 4.0 * l * l * static_cast<double>(spec.d_model) *
                     static_cast<double>(spec.n_layers);
        }
    }
    return total;
}

ThroughputStats measure_throughput(const std::function<void()>& runnable, int64_t warmup,
                                   int64_t repeats) {
    if (repeats <= 0) fail("measure_throughput: repeats must be positive");
    if (warmup < 0) fail("measure_throughput: warmup must be non-negative");
    for (int64_t i = 0; i < warmup; ++i) runnable();

    ThroughputStats stats;
    stats.repeats = repeats;
    stats.samples_ms.reserve(static_cast<size_t>(repeats));
    for (int64_t i = 0; i < repeats; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        runnable();
        auto t1 = std::chrono::steady_clock::now();
        stats.samples_ms.push_back(
            std::chrono::duration<double, std::milli>(t1 - t0).count());
    }

    std::vector<double> sorted = stats.samples_ms;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double s : sorted) sum += s;
    stats.mean_ms = sum / static_cast<double>(repeats);
    size_t n = sorted.size();
    stats.median_ms = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    size_t p95_idx = static_cast<size_t>(std::ceil(0.95 * static_cast<double>(n))) - 1;
    stats.p95_ms = sorted[std::min(p95_idx, n - 1)];
    return stats;
}

}  // namespace spscan
