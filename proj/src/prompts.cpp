#include "spscan/prompts.hpp"

#include <set>

namespace spscan::prompts {

std::string render(std::string_view tmpl, const std::map<std::string, std::string>& subs) {
    std::string out;
    out.reserve(tmpl.size());
    std::set<std::string> used;
    size_t pos = 0;
    while (pos < tmpl.size()) {
        size_t open = tmpl.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            break;
        }
        size_t close = tmpl.find("}}", open + 2);
        if (close == std::string_view::npos) fail("prompt template: unterminated {{ marker");
        out.append(tmpl.substr(pos, open - pos));
        std::string key(tmpl.substr(open + 2, close - open - 2));
        auto it = subs.find(key);
        if (it == subs.end()) fail("prompt template: no substitution for {{" + key + "}}");
        out.append(it->second);
        used.insert(key);
        pos = close + 2;
    }
    for (const auto& [key, value] : subs)
        if (!used.count(key)) fail("prompt template: unused substitution '" + key + "'");
    return out;
}

std::string render_sentences(const Document& doc, int64_t begin, int64_t end) {
    if (begin < 0 || end > doc.sentence_count() || begin >= end)
        fail("render_sentences: range [" + std::to_string(begin) + "," + std::to_string(end) +
             ") invalid for doc '" + doc.doc_id + "' with " +
             std::to_string(doc.sentence_count()) + " sentences");
    std::string out;
    for (int64_t i = begin; i < end; ++i) {
        out += "[" + std::to_string(i) + "] " + collapse_whitespace(doc.sentence_text(i)) + "\n";
    }
    return out;
}

}  // namespace spscan::prompts
