#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spscan/common.hpp"

namespace spscan {

enum class JudgmentStatus { validated_pass1, validated_pass2, discarded, errored };

std::string to_string(JudgmentStatus s);
JudgmentStatus judgment_status_from_string(std::string_view s);

struct Judgment {
    std::string query_id;
    std::string doc_id;
    std::vector<int64_t> relevant;  // unit indices (sentences or chunks)
    JudgmentStatus status = JudgmentStatus::validated_pass1;
};

struct RankedRun {
    std::string query_id;
    std::vector<int64_t> ranked;  // unit indices, best first
};

// recall@k = |top-k ∩ relevant| / |relevant|; throws on empty relevant set.
double recall_at_k(std::span<const int64_t> ranked, std::span<const int64_t> relevant,
                   int64_t k);

// precision@k divides by min(k, |ranked|) so short runs are not punished
// for positions they never emitted.
double precision_at_k(std::span<const int64_t> ranked, std::span<const int64_t> relevant,
                      int64_t k);

// Binary-gain nDCG with the log2(rank+1) discount, ranks starting at 1.
double ndcg_at_k(std::span<const int64_t> ranked, std::span<const int64_t> relevant, int64_t k);

struct MetricSummary {
    double mean = 0.0;
    int64_t n = 0;
};

// Mean metric over queries, joining runs to judgments by query_id.
// Judgments with discarded or errored status are excluded. A run without a
// usable judgment, or vice versa, is an error.
enum class MetricKind { recall, precision, ndcg };

MetricSummary evaluate_runs(const std::vector<RankedRun>& runs,
                            const std::vector<Judgment>& judgments, MetricKind kind, int64_t k);

// Recall per relative-position bin: each relevant unit goes to bin
// floor(bins * index / unit_count); recall is computed within each bin.
struct PositionBin {
    int64_t bin = 0;
    double recall = 0.0;
    int64_t relevant_total = 0;
};

std::vector<PositionBin> recall_by_position(const std::vector<RankedRun>& runs,
                                            const std::vector<Judgment>& judgments,
                                            const std::map<std::string, int64_t>& unit_counts,
                                            int64_t k, int64_t bins = 10);

}  // namespace spscan
