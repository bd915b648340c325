#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "spscan/corpus.hpp"

namespace spscan {

// Word-level tokens: maximal runs of [A-Za-z0-9] or bytes >= 0x80 (so UTF-8
// words stay whole); any other non-space byte is a single-character token.
std::vector<std::string> word_tokenize(std::string_view text);

int64_t count_word_tokens(std::string_view text);

class Vocabulary {
public:
    static constexpr int32_t kUnkId = 0;   // out-of-vocabulary word
    static constexpr int32_t kSepId = 1;   // query / document separator
    static constexpr int32_t kDocId = 2;   // document boundary marker
    static constexpr int32_t kReservedCount = 3;

    Vocabulary();

    // Ids are dense and assigned in first-seen order over the given corpus,
    // so the same corpus always produces the same mapping.
    static Vocabulary build(std::span<const Document> docs,
                            std::span<const std::string> extra_texts = {});

    int32_t size() const { return static_cast<int32_t>(id_to_word_.size()); }
    int32_t id_of(std::string_view word) const;  // kUnkId if absent
    const std::string& word_of(int32_t id) const;
    int32_t add_word(const std::string& word);

    std::vector<int32_t> encode(std::string_view text) const;
    std::string decode(std::span<const int32_t> ids) const;

private:
    std::unordered_map<std::string, int32_t> word_to_id_;
    std::vector<std::string> id_to_word_;
};

// Query and document in one token stream: encode(query), separator, then the
// document sentence by sentence. eos_indices[i] is the position of the last
// token of sentence i; the last document token is always an eos position.
struct TokenizedInput {
    std::string doc_id;
    std::vector<int32_t> tokens;
    std::vector<int64_t> eos_indices;
    int64_t query_len = 0;

    int64_t total_tokens() const { return static_cast<int64_t>(tokens.size()); }
    int64_t sentence_count() const { return static_cast<int64_t>(eos_indices.size()); }
};

TokenizedInput tokenize(std::string_view query, const Document& doc, const Vocabulary& vocab);

}  // namespace spscan
