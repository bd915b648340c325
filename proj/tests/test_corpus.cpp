#include <fstream>

#include "doctest.h"
#include "spscan/corpus.hpp"
#include "support.hpp"

using namespace spscan;

TEST_CASE("segment_sentences splits on terminal punctuation at breaks") {
    auto spans = segment_sentences("One ends here. Two asks? Three shouts! four trails");
    REQUIRE(spans.size() == 4);
    std::string_view text = "One ends here. Two asks? Three shouts! four trails";
    auto piece = [&](size_t i) {
        return std::string(text.substr(static_cast<size_t>(spans[i].begin),
                                       static_cast<size_t>(spans[i].end - spans[i].begin)));
    };
    CHECK(piece(0) == "One ends here.");
    CHECK(piece(1) == "Two asks?");
    CHECK(piece(2) == "Three shouts!");
    CHECK(piece(3) == "four trails");
}

TEST_CASE("segment_sentences keeps abbreviations and initials attached") {
    auto one = [&](std::string_view t) { return segment_sentences(t).size(); };
    CHECK(one("Dr. Smith arrived late.") == 1);
    CHECK(one("See Fig. 3 for details.") == 1);
    CHECK(one("J. Smith wrote it.") == 1);
    CHECK(one("It cost 3.50 dollars total.") == 1);  // interior dot, no break after
    CHECK(one("We met at 5 p.m. and left.") == 1);
    // a normal word with a period still splits
    CHECK(one("It ended. Then more.") == 2);
}

TEST_CASE("segment_sentences merges sub-two-character fragments") {
    // a lone terminal mark is a one-character fragment and folds forward
    auto spans = segment_sentences("! real sentence follows.");
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].begin == 0);
    // trailing short fragment folds into the previous span
    auto tail = segment_sentences("A full sentence here. y");
    REQUIRE(tail.size() == 1);
    CHECK(tail[0].end == static_cast<int64_t>(std::string("A full sentence here. y").size()));
}

TEST_CASE("make_document validates and whitespace-only text yields no sentences") {
    Document doc = make_document("d1", "First bit. Second bit.", SourceTag::educational);
    CHECK(doc.sentence_count() == 2);
    CHECK(doc.sentence_text(0) == "First bit.");
    CHECK(doc.sentence_text(1) == "Second bit.");
    CHECK(make_document("d2", "   \n\t ", SourceTag::other).sentence_count() == 0);
}

TEST_CASE("Document::validate rejects overlap, inversion, out-of-bounds, empty spans") {
    Document doc;
    doc.doc_id = "bad";
    doc.text = "abcdef. ghijkl.";
    doc.sentences = {{0, 7}, {5, 15}};  // overlaps previous end
    CHECK_THROWS_AS(doc.validate(), error);
    doc.sentences = {{7, 3}};
    CHECK_THROWS_AS(doc.validate(), error);
    doc.sentences = {{0, 99}};
    CHECK_THROWS_AS(doc.validate(), error);
    doc.text = "ab   cd";
    doc.sentences = {{2, 5}};  // only whitespace inside
    CHECK_THROWS_AS(doc.validate(), error);
}

TEST_CASE("slice_document rebases spans and preserves sentence text") {
    Document doc = make_document("base", "Zero one. Two three. Four five. Six seven.",
                                 SourceTag::creative);
    REQUIRE(doc.sentence_count() == 4);
    Document cut = slice_document(doc, 1, 3);
    CHECK(cut.doc_id == "base#s1-3");
    CHECK(cut.sentence_count() == 2);
    CHECK(cut.sentence_text(0) == doc.sentence_text(1));
    CHECK(cut.sentence_text(1) == doc.sentence_text(2));
    CHECK(cut.sentences[0].begin == 0);
    CHECK(cut.source_tag == SourceTag::creative);
    CHECK_THROWS_AS(slice_document(doc, 2, 2), error);
    CHECK_THROWS_AS(slice_document(doc, -1, 2), error);
    CHECK_THROWS_AS(slice_document(doc, 0, 5), error);
}

TEST_CASE("ingest_directory sorts by path, skips empties, uses relative ids") {
    testing::temp_dir dir("ingest");
    std::filesystem::create_directories(dir / "sub");
    std::ofstream(dir / "b.txt") << "Second file. More.";
    std::ofstream(dir / "a.txt") << "First file here.";
    std::ofstream(dir / "empty.txt") << "   ";
    std::ofstream(dir.path() / "sub" / "c.txt") << "Nested file content.";

    auto docs = ingest_directory(dir.path(), SourceTag::official);
    REQUIRE(docs.size() == 3);
    CHECK(docs[0].doc_id == "a.txt");
    CHECK(docs[1].doc_id == "b.txt");
    CHECK(docs[2].doc_id == "sub/c.txt");
    CHECK(docs[0].source_tag == SourceTag::official);
    CHECK_THROWS_AS(ingest_directory(dir / "nope", SourceTag::other), error);
}

TEST_CASE("document jsonl round-trip preserves spans and tag") {
    testing::temp_dir dir("docio");
    std::vector<Document> docs = {
        make_document("r1", "Alpha beta. Gamma delta.", SourceTag::synthetic),
        make_document("r2", "Solo sentence only.", SourceTag::conversational),
    };
    auto path = dir / "docs.jsonl";
    save_documents(path, docs);
    auto back = load_documents(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].doc_id == "r1");
    CHECK(back[0].text == docs[0].text);
    CHECK(back[0].sentences.size() == docs[0].sentences.size());
    CHECK(back[1].source_tag == SourceTag::conversational);
}

TEST_CASE("source tag names round-trip and reject unknowns") {
    for (SourceTag t : {SourceTag::educational, SourceTag::creative, SourceTag::official,
                        SourceTag::conversational, SourceTag::synthetic, SourceTag::other})
        CHECK(source_tag_from_string(to_string(t)) == t);
    CHECK_THROWS_AS(source_tag_from_string("fiction"), error);
}
