#include "spscan/vocab.hpp"

#include <cctype>

namespace spscan {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

}  // namespace

std::vector<std::string> word_tokenize(std::string_view text) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (is_word_byte(c)) {
            size_t start = i;
            while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
            out.emplace_back(text.substr(start, i - start));
        } else {
            out.emplace_back(1, text[i]);
            ++i;
        }
    }
    return out;
}

int64_t count_word_tokens(std::string_view text) {
    int64_t n = 0;
    size_t i = 0;
    while (i < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        ++n;
        if (is_word_byte(c))
            while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
        else
            ++i;
    }
    return n;
}

Vocabulary::Vocabulary() {
    id_to_word_ = {"<unk>", "<sep>", "<doc>"};
    for (int32_t i = 0; i < kReservedCount; ++i) word_to_id_[id_to_word_[i]] = i;
}

Vocabulary Vocabulary::build(std::span<const Document> docs,
                             std::span<const std::string> extra_texts) {
    Vocabulary v;
    for (const Document& d : docs)
        for (const std::string& w : word_tokenize(d.text)) v.add_word(w);
    for (const std::string& t : extra_texts)
        for (const std::string& w : word_tokenize(t)) v.add_word(w);
    return v;
}

int32_t Vocabulary::id_of(std::string_view word) const {
    auto it = word_to_id_.find(std::string(word));
    return it == word_to_id_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::word_of(int32_t id) const {
    if (id < 0 || id >= size()) fail("token id out of range: " + std::to_string(id));
    return id_to_word_[static_cast<size_t>(id)];
}

int32_t Vocabulary::add_word(const std::string& word) {
    auto it = word_to_id_.find(word);
    if (it != word_to_id_.end()) return it->second;
    int32_t id = size();
    word_to_id_.emplace(word, id);
    id_to_word_.push_back(word);
    return id;
}

std::vector<int32_t> Vocabulary::encode(std::string_view text) const {
    std::vector<int32_t> out;
    for (const std::string& w : word_tokenize(text)) out.push_back(id_of(w));
    return out;
}

std::string Vocabulary::decode(std::span<const int32_t> ids) const {
    std::string out;
    for (int32_t id : ids) {
        if (!out.empty()) out.push_back(' ');
        out += word_of(id);
    }
    return out;
}

TokenizedInput tokenize(std::string_view query, const Document& doc, const Vocabulary& vocab) {
    TokenizedInput input;
    input.doc_id = doc.doc_id;
    input.tokens = vocab.encode(query);
    input.tokens.push_back(Vocabulary::kSepId);
    input.query_len = static_cast<int64_t>(input.tokens.size());

    for (int64_t s = 0; s < doc.sentence_count(); ++s) {
        std::vector<int32_t> ids = vocab.encode(doc.sentence_text(s));
        if (ids.empty())
            fail("doc '" + doc.doc_id + "' sentence " + std::to_string(s) +
                 " produced no tokens");
        input.tokens.insert(input.tokens.end(), ids.begin(), ids.end());
        input.eos_indices.push_back(static_cast<int64_t>(input.tokens.size()) - 1);
    }
    if (doc.sentence_count() == 0) fail("doc '" + doc.doc_id + "' has no sentences");
    return input;
}

}  // namespace spscan
