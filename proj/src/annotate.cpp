#include "spscan/annotate.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "spscan/jsonl.hpp"
#include "spscan/prompts.hpp"
#include "spscan/prompts_data.hpp"

namespace spscan {

std::string normalize_answer(std::string_view s) {
    std::string mapped;
    mapped.reserve(s.size());
    for (char c : s) {
        unsigned char uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc) || uc >= 0x80)
            mapped.push_back(static_cast<char>(std::tolower(uc)));
        else
            mapped.push_back(' ');
    }
    return collapse_whitespace(mapped);
}

namespace {

struct StageError {
    std::string reason;
};

// Marks sentences over non-overlapping windows; throws StageError once a
// window stays unusable through all retries.
std::set<int64_t> mark_windows(const Document& doc, const AnnotateItem& item,
                               LlmClient& annotator, int64_t window_sentences, int retries) {
    std::set<int64_t> marked;
    for (int64_t begin = 0; begin < doc.sentence_count(); begin += window_sentences) {
        int64_t end = std::min(doc.sentence_count(), begin + window_sentences);
        std::string prompt = prompts::render(
            prompts::annotate_window,
            {{"QUESTION", collapse_whitespace(item.query)},
             {"ANSWER", collapse_whitespace(item.gold_answer)},
             {"SENTENCES", prompts::render_sentences(doc, begin, end)}});

        std::string last = "no attempts made";
        bool ok = false;
        for (int attempt = 0; attempt < retries && !ok; ++attempt) {
            std::string completion;
            try {
                completion = annotator.complete(prompt);
            } catch (const std::exception& e) {
                last = std::string("request failed: ") + e.what();
                continue;
            }
            std::string why;
            std::optional<json> j = extract_fenced_json(completion, &why);
            if (!j || !j->contains("relevant_sentences") ||
                !(*j)["relevant_sentences"].is_array()) {
                last = "unusable annotation: " + (j ? "missing relevant_sentences" : why);
                continue;
            }
            bool valid = true;
            std::set<int64_t> window_marks;
            for (const json& v : (*j)["relevant_sentences"]) {
                if (!v.is_number_integer()) {
                    valid = false;
                    break;
                }
                int64_t idx = v.get<int64_t>();
                if (idx < begin || idx >= end) {
                    valid = false;
                    break;
                }
                window_marks.insert(idx);
            }
            if (!valid) {
                last = "annotation labels outside the window";
                continue;
            }
            marked.insert(window_marks.begin(), window_marks.end());
            ok = true;
        }
        if (!ok)
            throw StageError{"window [" + std::to_string(begin) + "," + std::to_string(end) +
                             "): " + last};
    }
    return marked;
}

// Answers from the marked sentences only; empty marks fail validation
// without an answerer call.
bool validate_marks(const Document& doc, const AnnotateItem& item, LlmClient& answerer,
                    const std::set<int64_t>& marked, int retries) {
    if (marked.empty()) return false;
    std::string lines;
    for (int64_t idx : marked)
        lines += "[" + std::to_string(idx) + "] " +
                 collapse_whitespace(doc.sentence_text(idx)) + "\n";
    std::string prompt =
        prompts::render(prompts::answer_from_sentences,
                        {{"QUESTION", collapse_whitespace(item.query)}, {"SENTENCES", lines}});

    std::string last = "no attempts made";
    for (int attempt = 0; attempt < retries; ++attempt) {
        std::string completion;
        try {
            completion = answerer.complete(prompt);
        } catch (const std::exception& e) {
            last = std::string("request failed: ") + e.what();
            continue;
        }
        std::string why;
        std::optional<json> j = extract_fenced_json(completion, &why);
        if (!j || !j->contains("answer") || !(*j)["answer"].is_string()) {
            last = "unusable answer";
            continue;
        }
        return normalize_answer((*j)["answer"].get<std::string>()) ==
               normalize_answer(item.gold_answer);
    }
    throw StageError{"validation: " + last};
}

}  // namespace

std::vector<Judgment> annotate_validate(const std::vector<AnnotateItem>& items,
                                        const std::vector<Document>& docs,
                                        LlmClient& annotator, LlmClient& answerer,
                                        const AnnotateConfig& cfg) {
    std::map<std::string_view, const Document*> by_id;
    for (const Document& d : docs) by_id[d.doc_id] = &d;

    std::vector<Judgment> out;
    for (const AnnotateItem& item : items) {
        auto it = by_id.find(item.doc_id);
        if (it == by_id.end()) fail("annotate item references unknown doc '" + item.doc_id + "'");
        const Document& doc = *it->second;

        Judgment j;
        j.query_id = item.query_id;
        j.doc_id = item.doc_id;
        try {
            std::set<int64_t> marked =
                mark_windows(doc, item, annotator, cfg.window_sentences, cfg.retries);
            if (validate_marks(doc, item, answerer, marked, cfg.retries)) {
                j.relevant.assign(marked.begin(), marked.end());
                j.status = JudgmentStatus::validated_pass1;
            } else {
                marked = mark_windows(doc, item, annotator, cfg.expanded_window_sentences,
                                      cfg.retries);
                if (validate_marks(doc, item, answerer, marked, cfg.retries)) {
                    j.relevant.assign(marked.begin(), marked.end());
                    j.status = JudgmentStatus::validated_pass2;
                } else {
                    j.status = JudgmentStatus::discarded;
                }
            }
        } catch (const StageError&) {
            j.relevant.clear();
            j.status = JudgmentStatus::errored;
        }
        out.push_back(std::move(j));
    }
    return out;
}

}  // namespace spscan
