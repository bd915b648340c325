#include "spscan/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "spscan/vocab.hpp"

namespace spscan {

std::vector<RetrievalUnit> make_word_chunks(const Document& doc, int64_t target_words) {
    if (target_words <= 0) fail("make_word_chunks: target_words must be positive");
    std::vector<RetrievalUnit> units;
    RetrievalUnit cur;
    int64_t words = 0;
    for (int64_t s = 0; s < doc.sentence_count(); ++s) {
        cur.sentence_indices.push_back(s);
        if (!cur.text.empty()) cur.text += " ";
        cur.text += std::string(doc.sentence_text(s));
        words += count_word_tokens(doc.sentence_text(s));
        if (words >= target_words) {
            cur.unit_index = static_cast<int64_t>(units.size());
            units.push_back(std::move(cur));
            cur = {};
            words = 0;
        }
    }
    if (!cur.sentence_indices.empty()) {
        cur.unit_index = static_cast<int64_t>(units.size());
        units.push_back(std::move(cur));
    }
    if (units.empty()) fail("make_word_chunks: document '" + doc.doc_id + "' has no sentences");
    return units;
}

std::vector<RetrievalUnit> make_sentence_units(const Document& doc) {
    std::vector<RetrievalUnit> units;
    for (int64_t s = 0; s < doc.sentence_count(); ++s)
        units.push_back({s, {s}, std::string(doc.sentence_text(s))});
    if (units.empty()) fail("make_sentence_units: document '" + doc.doc_id + "' has no sentences");
    return units;
}

std::string to_string(BaselineMode mode) {
    return mode == BaselineMode::chunks5 ? "chunks5" : "sentences50";
}

BaselineMode baseline_mode_from_string(std::string_view s) {
    if (s == "chunks5") return BaselineMode::chunks5;
    if (s == "sentences50") return BaselineMode::sentences50;
    fail("unknown baseline mode: " + std::string(s));
}

bool is_stopword(std::string_view lower_word) {
    static const std::set<std::string, std::less<>> words = {
        "a",    "an",   "and",  "are",  "as",   "at",   "be",   "by",   "for", "from",
        "has",  "have", "he",   "her",  "his",  "i",    "in",   "is",   "it",  "its",
        "of",   "on",   "or",   "she",  "that", "the",  "their", "they", "this", "to",
        "was",  "we",   "were", "what", "when", "where", "which", "who", "will", "with",
        "you",  "your", "does", "do",   "how",  "why",
    };
    return words.count(lower_word) > 0;
}

namespace {

std::vector<std::string> query_terms(std::string_view query) {
    std::vector<std::string> terms;
    for (const std::string& w : word_tokenize(query)) {
        std::string lw = to_lower(w);
        if (!is_stopword(lw)) terms.push_back(lw);
    }
    return terms;
}

RankedRun rank_by_scores(const std::vector<double>& scores, const std::string& query_id) {
    std::vector<int64_t> order(scores.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int64_t>(i);
    std::sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
        double sa = scores[static_cast<size_t>(a)], sb = scores[static_cast<size_t>(b)];
        return sa != sb ? sa > sb : a < b;
    });
    return {query_id, std::move(order)};
}

}  // namespace

RankedRun bm25_rank(std::string_view query, const std::vector<RetrievalUnit>& units,
                    const std::string& query_id, const Bm25Params& params) {
    if (units.empty()) fail("bm25_rank: empty unit set");
    std::vector<std::string> terms = query_terms(query);

    // term frequencies and lengths per unit
    std::vector<std::unordered_map<std::string, int64_t>> tf(units.size());
    std::vector<int64_t> len(units.size(), 0);
    double avg_len = 0.0;
    for (size_t u = 0; u < units.size(); ++u) {
        for (const std::string& w : word_tokenize(units[u].text)) ++tf[u][to_lower(w)];
        for (const auto& [term, count] : tf[u]) len[u] += count;
        avg_len += static_cast<double>(len[u]);
    }
    avg_len /= static_cast<double>(units.size());

    std::vector<double> scores(units.size(), 0.0);
    double n_units = static_cast<double>(units.size());
    for (const std::string& term : terms) {
        int64_t df = 0;
        for (size_t u = 0; u < units.size(); ++u)
            if (tf[u].count(term)) ++df;
        if (df == 0) continue;
        // Robertson idf, clamped so ubiquitous terms cannot go negative
        double idf =
            std::max(0.0, std::log((n_units - static_cast<double>(df) + 0.5) /
                                   (static_cast<double>(df) + 0.5)));
        for (size_t u = 0; u < units.size(); ++u) {
            auto it = tf[u].find(term);
            if (it == tf[u].end()) continue;
            double f = static_cast<double>(it->second);
            double norm = params.k1 * (1.0 - params.b +
                                       params.b * static_cast<double>(len[u]) / avg_len);
            scores[u] += idf * (f * (params.k1 + 1.0)) / (f + norm);
        }
    }
    return rank_by_scores(scores, query_id);
}

RankedRun embedding_rank(std::string_view query, const std::vector<RetrievalUnit>& units,
                         const std::string& query_id, EmbeddingProvider& embedder) {
    if (units.empty()) fail("embedding_rank: empty unit set");
    std::vector<double> q = embedder.embed(std::string(query));
    double qn = 0.0;
    for (double x : q) qn += x * x;
    if (qn == 0.0) fail("embedding_rank: query embedded to the zero vector");

    std::vector<double> scores(units.size(), 0.0);
    for (size_t u = 0; u < units.size(); ++u) {
        std::vector<double> e = embedder.embed(units[u].text);
        double en = 0.0;
        for (double x : e) en += x * x;
        // an empty-ish unit gets the floor score instead of poisoning the run
        scores[u] = en == 0.0 ? -1.0 : cosine_similarity(q, e);
    }
    return rank_by_scores(scores, query_id);
}

}  // namespace spscan
