#include <set>

#include "doctest.h"
#include "spscan/embedding.hpp"
#include "spscan/llm_client.hpp"
#include "spscan/records.hpp"
#include "spscan/synthgen.hpp"
#include "support.hpp"

using namespace spscan;

namespace {

// 6 docs x 30 sentences with planted needle/anchor token pairs
std::vector<Document> small_corpus() {
    NeedleCorpusConfig cfg;
    cfg.n_docs = 6;
    cfg.sentences_per_doc = 30;
    cfg.words_per_sentence = 8;
    cfg.n_keys = 3;
    cfg.needles_per_doc = 2;
    cfg.seed = 97;
    cfg.doc_prefix = "sy";
    return make_needle_corpus(cfg).docs;
}

SynthConfig small_synth(int64_t min_tokens, int64_t chunk_sentences) {
    SynthConfig cfg;
    cfg.min_subseq_tokens = min_tokens;
    cfg.max_subseq_tokens = 2000;
    cfg.chunk_sentences = chunk_sentences;
    cfg.context_sentences = 18;
    cfg.seed = 5;
    return cfg;
}

void check_chunks_valid(const SynthRecord& rec, const std::vector<Document>& docs) {
    const Document* doc = nullptr;
    for (const Document& d : docs)
        if (d.doc_id == rec.doc_id) doc = &d;
    REQUIRE(doc != nullptr);
    CHECK(rec.chunk_a.begin >= 0);
    CHECK(rec.chunk_a.end > rec.chunk_a.begin);
    CHECK(rec.chunk_a.end <= doc->sentence_count());
    if (rec.chunk_b) {
        CHECK(rec.chunk_b->end > rec.chunk_b->begin);
        CHECK(rec.chunk_b->end <= doc->sentence_count());
        // chunks never overlap
        CHECK((rec.chunk_b->end <= rec.chunk_a.begin || rec.chunk_b->begin >= rec.chunk_a.end));
    }
    CHECK_FALSE(rec.question.empty());
    CHECK_FALSE(rec.labeled_sentences.empty());
    for (int64_t s : rec.labeled_sentences) {
        bool in_a = s >= rec.chunk_a.begin && s < rec.chunk_a.end;
        bool in_b = rec.chunk_b && s >= rec.chunk_b->begin && s < rec.chunk_b->end;
        CHECK((in_a || in_b));
    }
}

}  // namespace

TEST_CASE("sample_subsequence respects token bounds") {
    SynthConfig cfg;
    cfg.min_subseq_tokens = 30;
    cfg.max_subseq_tokens = 60;

    std::string text;
    for (int s = 0; s < 20; ++s)
        text += "alpha beta gamma delta epsilon sentence" + std::to_string(s) + ".  ";
    Document doc = make_document("sub", text, SourceTag::other);  // 7 tokens per sentence
    auto rng = fork_rng(3, "subseq");
    for (int trial = 0; trial < 40; ++trial) {
        auto range = sample_subsequence(doc, cfg, rng);
        REQUIRE(range.has_value());
        CHECK(range->begin >= 0);
        CHECK(range->end <= doc.sentence_count());
        int64_t tokens = 0;
        for (int64_t s = range->begin; s < range->end; ++s)
            tokens += count_word_tokens(doc.sentence_text(s));
        CHECK(tokens >= cfg.min_subseq_tokens);
        CHECK(tokens <= cfg.max_subseq_tokens);
    }
}

TEST_CASE("sample_subsequence returns the whole short document") {
    SynthConfig cfg;  // min 2000 tokens
    Document doc = make_document("short", "tiny doc. second line.", SourceTag::other);
    auto rng = fork_rng(4, "short");
    auto range = sample_subsequence(doc, cfg, rng);
    REQUIRE(range.has_value());
    CHECK(range->begin == 0);
    CHECK(range->end == doc.sentence_count());
}

TEST_CASE("sample_subsequence refuses when one sentence bursts the maximum") {
    SynthConfig cfg;
    cfg.min_subseq_tokens = 5;
    cfg.max_subseq_tokens = 10;
    std::string giant = "w";
    for (int i = 0; i < 49; ++i) giant += " w";
    Document doc = make_document("giant", giant + ".", SourceTag::other);  // 51 tokens, 1 sentence
    auto rng = fork_rng(5, "giant");
    CHECK_FALSE(sample_subsequence(doc, cfg, rng).has_value());

    Document empty;
    empty.doc_id = "none";
    CHECK_FALSE(sample_subsequence(empty, cfg, rng).has_value());
}

TEST_CASE("chunk strategy: every record is schema-valid with labels in the chunk") {
    auto docs = small_corpus();
    MockLlmClient llm;
    HashedBowEmbedder embedder;
    SynthBatch batch = generate_synth(docs, "chunk", 3, llm, embedder, small_synth(60, 6));

    CHECK(batch.records.size() + batch.skipped.size() == docs.size() * 3);
    CHECK(batch.records.size() >= docs.size());  // the mock answers every chunk prompt
    for (const SynthRecord& rec : batch.records) {
        CHECK(rec.strategy == "chunk");
        CHECK_FALSE(rec.chunk_b.has_value());
        CHECK_FALSE(rec.connection.has_value());
        check_chunks_valid(rec, docs);
    }
}

TEST_CASE("pair strategy: two disjoint chunks, labels confined to their union") {
    auto docs = small_corpus();
    MockLlmClient llm;
    HashedBowEmbedder embedder;
    SynthBatch batch = generate_synth(docs, "pair", 2, llm, embedder, small_synth(150, 6));

    CHECK(batch.records.size() + batch.skipped.size() == docs.size() * 2);
    CHECK_FALSE(batch.records.empty());
    for (const SynthRecord& rec : batch.records) {
        CHECK(rec.strategy == "pair");
        REQUIRE(rec.chunk_b.has_value());
        check_chunks_valid(rec, docs);
    }
}

TEST_CASE("link strategy: connection recorded, chunks disjoint, labels inside") {
    auto docs = small_corpus();
    MockLlmClient llm;
    HashedBowEmbedder embedder;
    SynthBatch batch = generate_synth(docs, "link", 2, llm, embedder, small_synth(150, 4));

    CHECK(batch.records.size() + batch.skipped.size() == docs.size() * 2);
    CHECK_FALSE(batch.records.empty());
    for (const SynthRecord& rec : batch.records) {
        CHECK(rec.strategy == "link");
        REQUIRE(rec.chunk_b.has_value());
        REQUIRE(rec.connection.has_value());
        CHECK_FALSE(rec.connection->empty());
        check_chunks_valid(rec, docs);
    }
}

TEST_CASE("generation is deterministic and independent of document order") {
    auto docs = small_corpus();
    HashedBowEmbedder embedder;
    auto dump = [&](const SynthBatch& batch) {
        std::vector<std::string> rows;
        for (const SynthRecord& rec : batch.records) {
            json j = rec;
            rows.push_back(j.dump());
        }
        return rows;
    };

    MockLlmClient llm1, llm2, llm3;
    auto rows1 = dump(generate_synth(docs, "chunk", 2, llm1, embedder, small_synth(60, 6)));
    auto rows2 = dump(generate_synth(docs, "chunk", 2, llm2, embedder, small_synth(60, 6)));
    CHECK(rows1 == rows2);

    std::vector<Document> reversed(docs.rbegin(), docs.rend());
    auto rows3 = dump(generate_synth(reversed, "chunk", 2, llm3, embedder, small_synth(60, 6)));
    std::multiset<std::string> set1(rows1.begin(), rows1.end());
    std::multiset<std::string> set3(rows3.begin(), rows3.end());
    CHECK(set1 == set3);

    SynthConfig other = small_synth(60, 6);
    other.seed = 6;
    MockLlmClient llm4;
    auto rows4 = dump(generate_synth(docs, "chunk", 2, llm4, embedder, other));
    CHECK(rows1 != rows4);
}

TEST_CASE("malformed completions retry; persistent failure becomes a recorded skip") {
    auto docs = small_corpus();
    HashedBowEmbedder embedder;

    MockLlmConfig flaky;
    flaky.fail_first_n = 2;  // fewer than the default 3 retries
    MockLlmClient llm(flaky);
    SynthBatch batch = generate_synth(docs, "chunk", 1, llm, embedder, small_synth(60, 6));
    CHECK(batch.records.size() == docs.size());

    MockLlmConfig dead;
    dead.fail_first_n = 1 << 20;
    MockLlmClient llm2(dead);
    SynthBatch failed = generate_synth(docs, "chunk", 1, llm2, embedder, small_synth(60, 6));
    CHECK(failed.records.empty());
    REQUIRE(failed.skipped.size() == docs.size());
    for (const SynthSkip& skip : failed.skipped) {
        CHECK(skip.strategy == "chunk");
        CHECK(skip.reason.find("unparseable completion") != std::string::npos);
    }
}

TEST_CASE("generate_synth validates strategy and per_doc") {
    auto docs = small_corpus();
    MockLlmClient llm;
    HashedBowEmbedder embedder;
    CHECK_THROWS_AS(generate_synth(docs, "story", 1, llm, embedder, SynthConfig{}), error);
    CHECK_THROWS_AS(generate_synth(docs, "chunk", 0, llm, embedder, SynthConfig{}), error);
}

namespace {

Document hundred_sentences() {
    std::string text;
    for (int i = 0; i < 100; ++i)
        text += "unique sentence number " + std::to_string(i) + " lives here.  ";
    return make_document("big", text, SourceTag::other);
}

SynthRecord record_over(const Document& doc, int64_t begin, int64_t end) {
    SynthRecord rec;
    rec.doc_id = doc.doc_id;
    rec.strategy = "chunk";
    rec.question = "q";
    rec.chunk_a = {begin, end};
    rec.labeled_sentences = {begin};
    return rec;
}

}  // namespace

TEST_CASE("decontaminate drops only above-threshold overlap: 1% boundary is kept") {
    Document doc = hundred_sentences();
    std::vector<Document> docs = {doc};
    std::vector<SynthRecord> records = {record_over(doc, 0, 100)};

    // exactly 1 of 100 chunk sentences in the test set: overlap == threshold
    std::vector<std::string> one = {std::string(doc.sentence_text(7))};
    DecontamResult at = decontaminate(records, docs, one, 0.01);
    CHECK(at.kept.size() == 1);
    CHECK(at.dropped.empty());

    // 2 of 100: strictly above, dropped with the overlap reported
    std::vector<std::string> two = {std::string(doc.sentence_text(7)),
                                    std::string(doc.sentence_text(8))};
    DecontamResult above = decontaminate(records, docs, two, 0.01);
    CHECK(above.kept.empty());
    REQUIRE(above.dropped.size() == 1);
    CHECK(above.dropped[0].record_index == 0);
    CHECK(above.dropped[0].doc_id == "big");
    CHECK(above.dropped[0].overlap == doctest::Approx(0.02));
}

TEST_CASE("decontaminate matches sentences after whitespace normalization") {
    Document doc = hundred_sentences();
    std::vector<Document> docs = {doc};
    std::vector<SynthRecord> records = {record_over(doc, 0, 10)};
    // same sentence text, different spacing: still a match
    std::string wild = "unique   sentence\tnumber 3\n lives here.";
    DecontamResult res = decontaminate(records, docs, {wild}, 0.05);
    REQUIRE(res.dropped.size() == 1);  // 1/10 = 0.10 > 0.05
    CHECK(res.dropped[0].overlap == doctest::Approx(0.1));
}

TEST_CASE("decontaminate unions chunk_a and chunk_b and validates references") {
    Document doc = hundred_sentences();
    std::vector<Document> docs = {doc};
    SynthRecord rec = record_over(doc, 0, 10);
    rec.chunk_b = SentenceRange{50, 60};
    // 1 matching sentence out of 20 union sentences: 0.05, kept at 0.05
    DecontamResult res = decontaminate({rec}, docs, {std::string(doc.sentence_text(55))}, 0.05);
    CHECK(res.kept.size() == 1);
    DecontamResult res2 = decontaminate({rec}, docs, {std::string(doc.sentence_text(55))}, 0.04);
    CHECK(res2.dropped.size() == 1);

    SynthRecord orphan = record_over(doc, 0, 10);
    orphan.doc_id = "ghost";
    CHECK_THROWS_AS(decontaminate({orphan}, docs, {}, 0.01), error);
    SynthRecord oob = record_over(doc, 90, 101);
    CHECK_THROWS_AS(decontaminate({oob}, docs, {}, 0.01), error);
}

TEST_CASE("synth_to_example rebases labels onto the padded slice") {
    Document doc = hundred_sentences();
    SynthRecord rec;
    rec.doc_id = doc.doc_id;
    rec.strategy = "pair";
    rec.question = "which sentences matter?";
    rec.chunk_a = {10, 12};
    rec.chunk_b = SentenceRange{2, 4};
    rec.labeled_sentences = {2, 11};

    SynthTrainingView view = synth_to_example(rec, doc, 1);
    // slice covers [min(2,10)-1, max(4,12)+1) = [1, 13)
    CHECK(view.doc.sentence_count() == 12);
    CHECK(view.doc.sentence_text(0) == doc.sentence_text(1));
    CHECK(view.example.doc_id == view.doc.doc_id);
    CHECK(view.example.query == rec.question);
    REQUIRE(view.example.labels.size() == 12);
    for (size_t i = 0; i < view.example.labels.size(); ++i) {
        bool expected = i == 1 || i == 10;  // doc sentences 2 and 11
        CHECK(view.example.labels[i] == (expected ? 1 : 0));
    }

    // padding clamps at the document edges
    SynthTrainingView wide = synth_to_example(rec, doc, 1000);
    CHECK(wide.doc.sentence_count() == doc.sentence_count());

    SynthRecord bad = rec;
    bad.labeled_sentences = {50};  // outside the padded slice
    CHECK_THROWS_AS(synth_to_example(bad, doc, 1), error);
}
