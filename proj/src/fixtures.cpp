#include "spscan/fixtures.hpp"

#include <algorithm>
#include <set>

namespace spscan {

namespace {

constexpr int kKeyWidth = 2;

std::string pad_key(int64_t key) {
    std::string digits = std::to_string(key);
    while (static_cast<int>(digits.size()) < kKeyWidth) digits.insert(digits.begin(), '0');
    return digits;
}

// invented two/three-syllable words; no overlap with query phrasing, needle
// prefixes, or common English
const std::vector<std::string>& filler_lexicon() {
    static const std::vector<std::string> lex = [] {
        const std::vector<std::string> syl = {"ba", "do", "fi", "gu", "ka", "lo", "mi", "nu",
                                              "pe", "ra", "su", "ti", "vo", "wa", "ze", "hy"};
        std::vector<std::string> words;
        auto rng = fork_rng(0x5eed, "filler-lexicon");
        std::set<std::string> seen;
        while (words.size() < 200) {
            size_t n = 2 + draw_u64(rng, 0, 1);
            std::string w;
            for (size_t i = 0; i < n; ++i) w += syl[draw_u64(rng, 0, syl.size() - 1)];
            if (seen.insert(w).second) words.push_back(w);
        }
        return words;
    }();
    return lex;
}

std::string filler_sentence(int64_t n_words, std::mt19937_64& rng,
                            int64_t needle_word = -1, const std::string& needle = {}) {
    const auto& lex = filler_lexicon();
    std::string s;
    for (int64_t w = 0; w < n_words; ++w) {
        if (!s.empty()) s += " ";
        if (w == needle_word)
            s += needle;
        else
            s += lex[draw_u64(rng, 0, lex.size() - 1)];
    }
    return s + ".";
}

}  // namespace

std::string needle_token(int64_t key) { return "beacon" + pad_key(key); }
std::string anchor_token(int64_t key) { return "anchor" + pad_key(key); }

FixtureCorpus make_needle_corpus(const NeedleCorpusConfig& cfg) {
    if (cfg.needles_per_doc < 1 || cfg.needles_per_doc > cfg.sentences_per_doc)
        fail("make_needle_corpus: needles_per_doc out of range");
    FixtureCorpus out;
    for (int64_t d = 0; d < cfg.n_docs; ++d) {
        std::string doc_id = cfg.doc_prefix + pad_key(d / 100) + pad_key(d % 100);
        auto rng = fork_rng(cfg.seed, doc_id);
        int64_t key = d % cfg.n_keys;

        auto [lo, hi] = cfg.needle_range ? cfg.needle_range(d)
                                         : std::pair<int64_t, int64_t>{0, cfg.sentences_per_doc - 1};
        if (lo < 0 || hi >= cfg.sentences_per_doc || lo > hi)
            fail("make_needle_corpus: needle range invalid for doc " + std::to_string(d));
        std::set<int64_t> needles;
        while (static_cast<int64_t>(needles.size()) < cfg.needles_per_doc)
            needles.insert(static_cast<int64_t>(
                draw_u64(rng, static_cast<uint64_t>(lo), static_cast<uint64_t>(hi))));

        std::string text;
        for (int64_t s = 0; s < cfg.sentences_per_doc; ++s) {
            if (!text.empty()) text += " ";
            if (needles.count(s))
                text += filler_sentence(cfg.words_per_sentence, rng,
                                        cfg.words_per_sentence / 2, needle_token(key));
            else
                text += filler_sentence(cfg.words_per_sentence, rng);
        }
        Document doc = make_document(doc_id, std::move(text), SourceTag::synthetic);
        if (doc.sentence_count() != cfg.sentences_per_doc)
            fail("make_needle_corpus: segmentation changed the sentence count");

        std::string query = "Which part of the document relates to " + anchor_token(key) + "?";
        out.queries.push_back({doc_id + "#q0", doc_id, query});

        Judgment j;
        j.query_id = doc_id + "#q0";
        j.doc_id = doc_id;
        j.relevant.assign(needles.begin(), needles.end());
        j.status = JudgmentStatus::validated_pass1;
        out.judgments.push_back(std::move(j));

        TrainingExample ex;
        ex.doc_id = doc_id;
        ex.query = query;
        ex.labels.assign(static_cast<size_t>(cfg.sentences_per_doc), 0);
        for (int64_t s : needles) ex.labels[static_cast<size_t>(s)] = 1;
        out.examples.push_back(std::move(ex));

        out.items.push_back({doc_id + "#q0", doc_id, query, needle_token(key)});
        out.docs.push_back(std::move(doc));
    }
    return out;
}

FixtureCorpus make_longrange_corpus(const LongRangeConfig& cfg) {
    if (cfg.n_candidates < 2 || cfg.n_candidates > cfg.n_keys)
        fail("make_longrange_corpus: n_candidates out of range");
    FixtureCorpus out;
    int64_t tokens_per_sentence = cfg.words_per_sentence + 1;  // trailing period
    int64_t filler_sentences =
        (cfg.separation_tokens + tokens_per_sentence - 1) / tokens_per_sentence;

    for (int64_t d = 0; d < cfg.n_docs; ++d) {
        std::string doc_id = cfg.doc_prefix + pad_key(d / 100) + pad_key(d % 100);
        auto rng = fork_rng(cfg.seed, doc_id);
        int64_t key = d % cfg.n_keys;

        // candidate keys: the document's own plus distinct decoys, shuffled
        std::vector<int64_t> candidates = {key};
        while (static_cast<int64_t>(candidates.size()) < cfg.n_candidates) {
            int64_t decoy = static_cast<int64_t>(draw_u64(rng, 0, cfg.n_keys - 1));
            if (std::find(candidates.begin(), candidates.end(), decoy) == candidates.end())
                candidates.push_back(decoy);
        }
        for (size_t i = candidates.size(); i > 1; --i)
            std::swap(candidates[i - 1], candidates[draw_u64(rng, 0, i - 1)]);

        std::vector<std::string> sentences;
        for (int64_t s = 0; s < cfg.lead_sentences; ++s)
            sentences.push_back(filler_sentence(cfg.words_per_sentence, rng));
        int64_t marker_idx = static_cast<int64_t>(sentences.size());
        sentences.push_back("the working key for this document is " + needle_token(key) + ".");
        for (int64_t s = 0; s < filler_sentences; ++s)
            sentences.push_back(filler_sentence(cfg.words_per_sentence, rng));
        int64_t payload_idx = -1;
        for (int64_t c = 0; c < cfg.n_candidates; ++c) {
            if (candidates[static_cast<size_t>(c)] == key)
                payload_idx = static_cast<int64_t>(sentences.size());
            sentences.push_back("segment " + needle_token(candidates[static_cast<size_t>(c)]) +
                                " carries the payload record.");
        }
        for (int64_t s = 0; s < cfg.tail_sentences; ++s)
            sentences.push_back(filler_sentence(cfg.words_per_sentence, rng));

        std::string text;
        for (const std::string& s : sentences) {
            if (!text.empty()) text += " ";
            text += s;
        }
        Document doc = make_document(doc_id, std::move(text), SourceTag::synthetic);
        if (doc.sentence_count() != static_cast<int64_t>(sentences.size()))
            fail("make_longrange_corpus: segmentation changed the sentence count");

        std::string query = "Which segment carries the payload for the working key?";
        out.queries.push_back({doc_id + "#q0", doc_id, query});

        Judgment j;
        j.query_id = doc_id + "#q0";
        j.doc_id = doc_id;
        j.relevant = {payload_idx};
        j.status = JudgmentStatus::validated_pass1;
        out.judgments.push_back(std::move(j));

        TrainingExample ex;
        ex.doc_id = doc_id;
        ex.query = query;
        ex.labels.assign(sentences.size(), 0);
        ex.labels[static_cast<size_t>(payload_idx)] = 1;
        out.examples.push_back(std::move(ex));

        out.items.push_back({doc_id + "#q0", doc_id, query, needle_token(key)});
        // the marker sentence separation must exceed the advertised gap
        (void)marker_idx;
        out.docs.push_back(std::move(doc));
    }
    return out;
}

Document make_filler_document(const std::string& doc_id, int64_t n_tokens, uint64_t seed) {
    if (n_tokens <= 0) fail("make_filler_document: n_tokens must be positive");
    auto rng = fork_rng(seed, doc_id);
    const int64_t words = 8, per_sentence = words + 1;
    std::string text;
    for (int64_t produced = 0; produced < n_tokens; produced += per_sentence) {
        if (!text.empty()) text += " ";
        text += filler_sentence(words, rng);
    }
    return make_document(doc_id, std::move(text), SourceTag::synthetic);
}

ScanModel random_model(const ModelDims& dims, Vocabulary vocab, uint64_t seed, double scale) {
    ScanModel m = init_model(dims, std::move(vocab), seed);
    auto rng = fork_rng(seed, "random-model");
    for (const TensorRef& ref : tensor_refs(m.params)) {
        bool is_a_raw = ref.name.find("a_raw") != std::string::npos;
        for (double& w : *ref.data)
            w = is_a_raw ? 2.0 * draw_unit(rng) - 1.0 : scale * draw_normal(rng);
    }
    return m;
}

}  // namespace spscan
