#include "spscan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace spscan {

std::string to_string(JudgmentStatus s) {
    switch (s) {
        case JudgmentStatus::validated_pass1: return "validated_pass1";
        case JudgmentStatus::validated_pass2: return "validated_pass2";
        case JudgmentStatus::discarded: return "discarded";
        case JudgmentStatus::errored: return "errored";
    }
    fail("unknown judgment status");
}

JudgmentStatus judgment_status_from_string(std::string_view s) {
    if (s == "validated_pass1") return JudgmentStatus::validated_pass1;
    if (s == "validated_pass2") return JudgmentStatus::validated_pass2;
    if (s == "discarded") return JudgmentStatus::discarded;
    if (s == "errored") return JudgmentStatus::errored;
    fail("unknown judgment status: " + std::string(s));
}

namespace {

void check_inputs(std::span<const int64_t> relevant, int64_t k) {
    if (relevant.empty()) fail("metric over empty relevant set");
    if (k <= 0) fail("metric with non-positive k");
}

// distinct relevant units found in the top k; duplicate ranked entries
// cannot inflate the count
int64_t hits_at_k(std::span<const int64_t> ranked, std::span<const int64_t> relevant, int64_t k) {
    std::unordered_set<int64_t> rel(relevant.begin(), relevant.end());
    int64_t limit = std::min<int64_t>(k, static_cast<int64_t>(ranked.size()));
    std::unordered_set<int64_t> found;
    for (int64_t i = 0; i < limit; ++i)
        if (rel.count(ranked[static_cast<size_t>(i)])) found.insert(ranked[static_cast<size_t>(i)]);
    return static_cast<int64_t>(found.size());
}

}  // namespace

double recall_at_k(std::span<const int64_t> ranked, std::span<const int64_t> relevant,
                   int64_t k) {
    check_inputs(relevant, k);
    std::set<int64_t> distinct(relevant.begin(), relevant.end());
    return static_cast<double>(hits_at_k(ranked, relevant, k)) /
           static_cast<double>(distinct.size());
}

double precision_at_k(std::span<const int64_t> ranked, std::span<const int64_t> relevant,
                      int64_t k) {
    check_inputs(relevant, k);
    int64_t denom = std::min<int64_t>(k, static_cast<int64_t>(ranked.size()));
    if (denom == 0) fail("precision over an empty run");
    return static_cast<double>(hits_at_k(ranked, relevant, k)) / static_cast<double>(denom);
}

double ndcg_at_k(std::span<const int64_t> ranked, std::span<const int64_t> relevant, int64_t k) {
    check_inputs(relevant, k);
    std::unordered_set<int64_t> rel(relevant.begin(), relevant.end());
    int64_t limit = std::min<int64_t>(k, static_cast<int64_t>(ranked.size()));
    double dcg = 0.0;
    for (int64_t i = 0; i < limit; ++i)
        if (rel.count(ranked[static_cast<size_t>(i)]))
            dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    int64_t ideal = std::min<int64_t>(k, static_cast<int64_t>(rel.size()));
    double idcg = 0.0;
    for (int64_t i = 0; i < ideal; ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    return dcg / idcg;
}

MetricSummary evaluate_runs(const std::vector<RankedRun>& runs,
                            const std::vector<Judgment>& judgments, MetricKind kind, int64_t k) {
    std::unordered_map<std::string, const Judgment*> by_query;
    for (const Judgment& j : judgments) {
        if (!by_query.emplace(j.query_id, &j).second)
            fail("duplicate judgment for query '" + j.query_id + "'");
    }

    MetricSummary out;
    double sum = 0.0;
    std::unordered_set<std::string> seen;
    for (const RankedRun& run : runs) {
        if (!seen.insert(run.query_id).second)
            fail("duplicate run for query '" + run.query_id + "'");
        auto it = by_query.find(run.query_id);
        if (it == by_query.end()) fail("run for query '" + run.query_id + "' has no judgment");
        const Judgment& j = *it->second;
        if (j.status == JudgmentStatus::discarded || j.status == JudgmentStatus::errored)
            continue;  // excluded from every denominator
        double value = 0.0;
        switch (kind) {
            case MetricKind::recall: value = recall_at_k(run.ranked, j.relevant, k); break;
            case MetricKind::precision: value = precision_at_k(run.ranked, j.relevant, k); break;
            case MetricKind::ndcg: value = ndcg_at_k(run.ranked, j.relevant, k); break;
        }
        sum += value;
        ++out.n;
    }
    if (out.n == 0) fail("no usable query after status filtering");
    out.mean = sum / static_cast<double>(out.n);
    return out;
}

std::vector<PositionBin> recall_by_position(const std::vector<RankedRun>& runs,
                                            const std::vector<Judgment>& judgments,
                                            const std::map<std::string, int64_t>& unit_counts,
                                            int64_t k, int64_t bins) {
    if (bins <= 0) fail("recall_by_position: bins must be positive");
    std::unordered_map<std::string, const Judgment*> by_query;
    for (const Judgment& j : judgments) by_query[j.query_id] = &j;

    std::vector<int64_t> hit(static_cast<size_t>(bins), 0);
    std::vector<int64_t> total(static_cast<size_t>(bins), 0);
    for (const RankedRun& run : runs) {
        auto it = by_query.find(run.query_id);
        if (it == by_query.end()) fail("run for query '" + run.query_id + "' has no judgment");
        const Judgment& j = *it->second;
        if (j.status == JudgmentStatus::discarded || j.status == JudgmentStatus::errored)
            continue;
        auto cit = unit_counts.find(j.doc_id);
        if (cit == unit_counts.end() || cit->second <= 0)
            fail("no unit count for doc '" + j.doc_id + "'");
        int64_t n_units = cit->second;

        std::unordered_set<int64_t> retrieved;
        int64_t limit = std::min<int64_t>(k, static_cast<int64_t>(run.ranked.size()));
        for (int64_t i = 0; i < limit; ++i)
            retrieved.insert(run.ranked[static_cast<size_t>(i)]);

        for (int64_t r : j.relevant) {
            if (r < 0 || r >= n_units)
                fail("relevant unit " + std::to_string(r) + " out of range for doc '" +
                     j.doc_id + "'");
            size_t bin = static_cast<size_t>(bins * r / n_units);
            ++total[bin];
            if (retrieved.count(r)) ++hit[bin];
        }
    }

    std::vector<PositionBin> out;
    for (int64_t b = 0; b < bins; ++b) {
        if (total[static_cast<size_t>(b)] == 0) continue;
        out.push_back({b,
                       static_cast<double>(hit[static_cast<size_t>(b)]) /
                           static_cast<double>(total[static_cast<size_t>(b)]),
                       total[static_cast<size_t>(b)]});
    }
    return out;
}

}  // namespace spscan
