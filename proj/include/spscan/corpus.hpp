#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spscan/common.hpp"

namespace spscan {

enum class SourceTag { educational, creative, official, conversational, synthetic, other };

std::string to_string(SourceTag tag);
SourceTag source_tag_from_string(std::string_view s);

struct SentenceSpan {
    int64_t begin = 0;  // byte offset into Document::text
    int64_t end = 0;    // exclusive

    bool operator==(const SentenceSpan&) const = default;
};

struct Document {
    std::string doc_id;
    std::string text;
    std::vector<SentenceSpan> sentences;
    SourceTag source_tag = SourceTag::other;

    int64_t sentence_count() const { return static_cast<int64_t>(sentences.size()); }

    std::string_view sentence_text(int64_t i) const {
        const SentenceSpan& s = sentences.at(static_cast<size_t>(i));
        return std::string_view(text).substr(static_cast<size_t>(s.begin),
                                             static_cast<size_t>(s.end - s.begin));
    }

    // Spans must be in order, non-overlapping, within text, and non-empty
    // after trimming. Throws naming the offending span.
    void validate() const;
};

// Deterministic rule-based splitter: terminal [.?!] followed by whitespace
// or end of text ends a sentence, with an abbreviation allowlist for '.'.
// Spans under two characters after trimming are merged into a neighbor.
std::vector<SentenceSpan> segment_sentences(std::string_view text);

Document make_document(std::string doc_id, std::string text, SourceTag tag);

// New document covering sentences [begin, end); spans are rebased onto the
// sliced text and the id records the slice for traceability.
Document slice_document(const Document& doc, int64_t begin_sentence, int64_t end_sentence);

// Reads every regular file under `input_dir` (sorted by relative path for a
// stable order), one document per file; doc_id is the relative path.
std::vector<Document> ingest_directory(const std::filesystem::path& input_dir, SourceTag tag);

std::vector<Document> load_documents(const std::filesystem::path& jsonl_path);
void save_documents(const std::filesystem::path& jsonl_path, const std::vector<Document>& docs);

}  // namespace spscan
