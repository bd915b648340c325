#include "spscan/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "spscan/jsonl.hpp"

namespace spscan {

std::string to_string(SourceTag tag) {
    switch (tag) {
        case SourceTag::educational: return "educational";
        case SourceTag::creative: return "creative";
        case SourceTag::official: return "official";
        case SourceTag::conversational: return "conversational";
        case SourceTag::synthetic: return "synthetic";
        case SourceTag::other: return "other";
    }
    fail("unknown source tag");
}

SourceTag source_tag_from_string(std::string_view s) {
    if (s == "educational") return SourceTag::educational;
    if (s == "creative") return SourceTag::creative;
    if (s == "official") return SourceTag::official;
    if (s == "conversational") return SourceTag::conversational;
    if (s == "synthetic") return SourceTag::synthetic;
    if (s == "other") return SourceTag::other;
    fail("unknown source_tag value: " + std::string(s));
}

void Document::validate() const {
    int64_t prev_end = 0;
    for (size_t i = 0; i < sentences.size(); ++i) {
        const SentenceSpan& s = sentences[i];
        std::string where = "doc '" + doc_id + "' sentence " + std::to_string(i);
        if (s.begin < prev_end || s.end <= s.begin ||
            s.end > static_cast<int64_t>(text.size()))
            fail(where + ": span [" + std::to_string(s.begin) + "," + std::to_string(s.end) +
                 ") out of order or out of bounds");
        if (trim(sentence_text(static_cast<int64_t>(i))).empty())
            fail(where + ": span is empty after trimming");
        prev_end = s.end;
    }
}

namespace {

bool is_ws(char c) { return std::isspace(static_cast<unsigned char>(c)); }

// Common abbreviations whose trailing period does not end a sentence.
const std::set<std::string, std::less<>>& abbreviations() {
    static const std::set<std::string, std::less<>> abbr = {
        "Mr.",  "Mrs.", "Ms.",  "Dr.",   "Prof.", "St.",  "Mt.",  "Jr.",
        "Sr.",  "vs.",  "etc.", "e.g.",  "i.e.",  "Fig.", "No.",  "Vol.",
        "Inc.", "Ltd.", "Co.",  "approx.", "a.m.", "p.m.", "U.S.", "U.K.",
    };
    return abbr;
}

bool ends_with_abbreviation(std::string_view text, size_t dot) {
    // token is the maximal non-whitespace run ending at the period
    size_t start = dot;
    while (start > 0 && !is_ws(text[start - 1])) --start;
    std::string_view token = text.substr(start, dot - start + 1);
    if (abbreviations().count(token)) return true;
    // single capital letter with period reads as an initial, e.g. "J. Smith"
    if (token.size() == 2 && std::isupper(static_cast<unsigned char>(token[0]))) return true;
    return false;
}

SentenceSpan trimmed(std::string_view text, size_t begin, size_t end) {
    while (begin < end && is_ws(text[begin])) ++begin;
    while (end > begin && is_ws(text[end - 1])) --end;
    return {static_cast<int64_t>(begin), static_cast<int64_t>(end)};
}

}  // namespace

std::vector<SentenceSpan> segment_sentences(std::string_view text) {
    std::vector<SentenceSpan> raw;
    size_t start = 0;
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        bool terminal = (c == '.' || c == '?' || c == '!');
        if (!terminal) continue;
        bool at_break = (i + 1 == text.size()) || is_ws(text[i + 1]);
        if (!at_break) continue;
        if (c == '.' && ends_with_abbreviation(text, i)) continue;
        SentenceSpan span = trimmed(text, start, i + 1);
        if (span.end > span.begin) raw.push_back(span);
        start = i + 1;
    }
    SentenceSpan tail = trimmed(text, start, text.size());
    if (tail.end > tail.begin) raw.push_back(tail);

    // Merge fragments shorter than two characters into the next span (or the
    // previous one at the end) so downstream labels never target noise spans.
    std::vector<SentenceSpan> out;
    for (size_t i = 0; i < raw.size(); ++i) {
        SentenceSpan cur = raw[i];
        while (cur.end - cur.begin < 2 && i + 1 < raw.size()) {
            cur = trimmed(text, static_cast<size_t>(cur.begin), static_cast<size_t>(raw[i + 1].end));
            ++i;
        }
        if (cur.end - cur.begin < 2 && !out.empty()) {
            SentenceSpan prev = out.back();
            out.pop_back();
            cur = trimmed(text, static_cast<size_t>(prev.begin), static_cast<size_t>(cur.end));
        }
        out.push_back(cur);
    }
    return out;
}

Document make_document(std::string doc_id, std::string text, SourceTag tag) {
    Document doc;
    doc.doc_id = std::move(doc_id);
    doc.text = std::move(text);
    doc.sentences = segment_sentences(doc.text);
    doc.source_tag = tag;
    doc.validate();
    return doc;
}

Document slice_document(const Document& doc, int64_t begin_sentence, int64_t end_sentence) {
    if (begin_sentence < 0 || end_sentence > doc.sentence_count() ||
        begin_sentence >= end_sentence)
        fail("slice_document: range [" + std::to_string(begin_sentence) + "," +
             std::to_string(end_sentence) + ") invalid for doc '" + doc.doc_id + "'");
    int64_t text_begin = doc.sentences[static_cast<size_t>(begin_sentence)].begin;
    int64_t text_end = doc.sentences[static_cast<size_t>(end_sentence - 1)].end;

    Document out;
    out.doc_id = doc.doc_id + "#s" + std::to_string(begin_sentence) + "-" +
                 std::to_string(end_sentence);
    out.text = doc.text.substr(static_cast<size_t>(text_begin),
                               static_cast<size_t>(text_end - text_begin));
    out.source_tag = doc.source_tag;
    for (int64_t i = begin_sentence; i < end_sentence; ++i) {
        const SentenceSpan& s = doc.sentences[static_cast<size_t>(i)];
        out.sentences.push_back({s.begin - text_begin, s.end - text_begin});
    }
    out.validate();
    return out;
}

std::vector<Document> ingest_directory(const std::filesystem::path& input_dir, SourceTag tag) {
    if (!std::filesystem::is_directory(input_dir))
        fail("ingest input is not a directory: " + input_dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(input_dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<Document> docs;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) fail("cannot open " + file.string());
        std::stringstream buf;
        buf << in.rdbuf();
        std::string text = buf.str();
        if (trim(text).empty()) continue;
        docs.push_back(make_document(
            std::filesystem::relative(file, input_dir).generic_string(), std::move(text), tag));
    }
    return docs;
}

void to_json(json& j, const SentenceSpan& s) { j = json{{"start", s.begin}, {"end", s.end}}; }

void from_json(const json& j, SentenceSpan& s) {
    s.begin = require_field<int64_t>(j, "start");
    s.end = require_field<int64_t>(j, "end");
}

void to_json(json& j, const Document& d) {
    j = json{{"doc_id", d.doc_id},
             {"text", d.text},
             {"sentences", d.sentences},
             {"source_tag", to_string(d.source_tag)}};
}

void from_json(const json& j, Document& d) {
    d.doc_id = require_field<std::string>(j, "doc_id");
    d.text = require_field<std::string>(j, "text");
    d.sentences = require_field<std::vector<SentenceSpan>>(j, "sentences");
    d.source_tag = source_tag_from_string(require_field<std::string>(j, "source_tag"));
    d.validate();
}

std::vector<Document> load_documents(const std::filesystem::path& jsonl_path) {
    return load_jsonl<Document>(jsonl_path);
}

void save_documents(const std::filesystem::path& jsonl_path, const std::vector<Document>& docs) {
    save_jsonl(jsonl_path, docs);
}

}  // namespace spscan
