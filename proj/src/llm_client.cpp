#include "spscan/llm_client.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>
#include <vector>

#include "httplib.h"
#include "spscan/common.hpp"

namespace spscan {

std::optional<nlohmann::json> extract_fenced_json(const std::string& completion,
                                                  std::string* why) {
    std::string content;
    size_t fence = completion.find("```");
    if (fence != std::string::npos) {
        size_t start = fence + 3;
        if (completion.compare(start, 4, "json") == 0) start += 4;
        while (start < completion.size() && (completion[start] == '\n' || completion[start] == '\r'))
            ++start;
        size_t close = completion.find("```", start);
        if (close == std::string::npos) {
            if (why) *why = "unterminated code fence";
            return std::nullopt;
        }
        content = completion.substr(start, close - start);
    } else {
        content = trim(completion);
        if (content.empty() || (content.front() != '{' && content.front() != '[')) {
            if (why) *why = "no fenced block and text does not look like json";
            return std::nullopt;
        }
    }

    std::string parse_err;
    try {
        return nlohmann::json::parse(content);
    } catch (const std::exception& e) {
        parse_err = e.what();
    }
    // single repair attempt: drop trailing commas before } or ]
    static const std::regex trailing_comma(R"(,(\s*[}\]]))");
    std::string repaired = std::regex_replace(content, trailing_comma, "$1");
    try {
        return nlohmann::json::parse(repaired);
    } catch (const std::exception&) {
        if (why) *why = parse_err;
        return std::nullopt;
    }
}

namespace {

struct PromptView {
    std::string task;
    std::string question;
    std::string connection;
    // section name -> (index, text) sentence lines; "" holds unsectioned lines
    std::vector<std::pair<std::string, std::vector<std::pair<int64_t, std::string>>>> sections;

    const std::vector<std::pair<int64_t, std::string>>* section(const std::string& name) const {
        for (const auto& [key, lines] : sections)
            if (key == name) return &lines;
        return nullptr;
    }

    std::vector<std::pair<int64_t, std::string>> all_sentences() const {
        std::vector<std::pair<int64_t, std::string>> out;
        for (const auto& [key, lines] : sections) out.insert(out.end(), lines.begin(), lines.end());
        return out;
    }
};

// section headers are ALL-CAPS lines ending in ':', e.g. "INITIAL CHUNK:"
bool is_section_header(const std::string& line) {
    if (line.size() < 2 || line.back() != ':') return false;
    for (size_t i = 0; i + 1 < line.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(line[i]);
        if (!std::isupper(c) && c != ' ') return false;
    }
    return true;
}

PromptView parse_prompt(const std::string& prompt) {
    PromptView view;
    view.sections.emplace_back("", std::vector<std::pair<int64_t, std::string>>{});
    static const std::regex sentence_line(R"(^\[(\d+)\] (.*)$)");
    std::istringstream in(prompt);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("TASK: ", 0) == 0) {
            view.task = trim(line.substr(6));
            continue;
        }
        if (line.rfind("QUESTION: ", 0) == 0) {
            view.question = trim(line.substr(10));
            continue;
        }
        if (line.rfind("CONNECTION: ", 0) == 0) {
            view.connection = trim(line.substr(12));
            continue;
        }
        if (is_section_header(line)) {
            view.sections.emplace_back(line.substr(0, line.size() - 1),
                                       std::vector<std::pair<int64_t, std::string>>{});
            continue;
        }
        std::smatch m;
        if (std::regex_match(line, m, sentence_line))
            view.sections.back().second.emplace_back(std::stoll(m[1].str()), m[2].str());
    }
    return view;
}

std::string format_key(const std::string& fmt, const std::string& key) {
    size_t pos = fmt.find("{}");
    if (pos == std::string::npos) return fmt + key;
    return fmt.substr(0, pos) + key + fmt.substr(pos + 2);
}

std::optional<std::string> first_capture(const std::regex& re, const std::string& text) {
    std::smatch m;
    if (std::regex_search(text, m, re) && m.size() > 1) return m[1].str();
    return std::nullopt;
}

std::string first_words(const std::string& text, size_t n) {
    std::istringstream in(text);
    std::string w, out;
    for (size_t i = 0; i < n && (in >> w); ++i) {
        if (!out.empty()) out += " ";
        out += w;
    }
    return out;
}

}  // namespace

MockLlmClient::MockLlmClient(MockLlmConfig cfg) : cfg_(std::move(cfg)) {}

std::string MockLlmClient::finish(nlohmann::json payload) const {
    std::string body = payload.dump();
    if (cfg_.trailing_commas && body.size() > 1)
        body.insert(body.size() - 1, ",");
    return "```json\n" + body + "\n```\n";
}

std::string MockLlmClient::complete(const std::string& prompt) {
    ++calls_;
    if (calls_ <= cfg_.fail_first_n) return "I could not produce structured output this time.";
    return respond(prompt);
}

std::string MockLlmClient::respond(const std::string& prompt) const {
    PromptView view = parse_prompt(prompt);
    const std::regex needle_re(cfg_.needle_regex);
    const std::regex key_re(cfg_.query_key_regex);

    auto needle_sentences = [&](const std::vector<std::pair<int64_t, std::string>>& lines,
                                const std::string& key) {
        std::vector<int64_t> out;
        std::string token = format_key(cfg_.needle_format, key);
        for (const auto& [idx, text] : lines)
            if (text.find(token) != std::string::npos) out.push_back(idx);
        return out;
    };
    auto first_needle_key = [&](const std::vector<std::pair<int64_t, std::string>>& lines)
        -> std::optional<std::string> {
        for (const auto& [idx, text] : lines)
            if (auto key = first_capture(needle_re, text)) return key;
        return std::nullopt;
    };

    if (view.task == "question_from_chunk" || view.task == "question_from_pair") {
        auto lines = view.all_sentences();
        if (lines.empty()) fail("mock llm: prompt lists no sentences");
        nlohmann::json out;
        if (auto key = first_needle_key(lines)) {
            out["question"] = format_key(cfg_.question_format, *key);
            out["relevant_sentences"] = needle_sentences(lines, *key);
        } else {
            out["question"] = "What does the passage beginning \"" +
                              first_words(lines.front().second, 4) + "\" discuss?";
            std::vector<int64_t> labels = {lines.front().first};
            if (view.task == "question_from_pair") {
                const auto* b = view.section("CHUNK B");
                if (b && !b->empty()) labels.push_back(b->front().first);
            }
            out["relevant_sentences"] = labels;
        }
        return finish(out);
    }

    if (view.task == "find_connections") {
        const auto* initial = view.section("INITIAL CHUNK");
        const auto* context = view.section("CONTEXT");
        if (!initial || !context || initial->empty() || context->empty())
            fail("mock llm: find_connections prompt missing sections");
        int64_t init_lo = initial->front().first, init_hi = initial->back().first;
        nlohmann::json links = nlohmann::json::array();
        // a context sentence sharing a needle key with the initial chunk links
        std::vector<std::string> keys;
        for (const auto& [idx, text] : *initial) {
            auto iter_begin = std::sregex_iterator(text.begin(), text.end(), needle_re);
            for (auto it = iter_begin; it != std::sregex_iterator(); ++it)
                if (it->size() > 1) keys.push_back((*it)[1].str());
        }
        for (const std::string& key : keys) {
            std::string token = format_key(cfg_.needle_format, key);
            for (const auto& [idx, text] : *context) {
                if (idx >= init_lo && idx <= init_hi) continue;
                if (text.find(token) == std::string::npos) continue;
                int64_t lo = std::max(context->front().first, idx - 9);
                int64_t hi = std::min(context->back().first + 1, idx + 11);
                links.push_back({{"start_sentence", lo},
                                 {"end_sentence", hi},
                                 {"connection", "both passages mention " + token}});
            }
        }
        if (links.empty()) {
            // fall back to the passage adjacent to the initial chunk
            int64_t ctx_lo = context->front().first, ctx_hi = context->back().first + 1;
            int64_t lo = init_hi + 1, hi = std::min(ctx_hi, init_hi + 21);
            if (lo >= hi) {
                hi = init_lo;
                lo = std::max(ctx_lo, init_lo - 20);
            }
            if (lo < hi)
                links.push_back({{"start_sentence", lo},
                                 {"end_sentence", hi},
                                 {"connection", "adjacent passage"}});
        }
        return finish({{"links", links}});
    }

    if (view.task == "link_question") {
        std::string key_source = view.connection;
        if (auto key = first_capture(needle_re, key_source)) {
            // the connection names the shared document token; the question
            // uses the paired query-side key with the same digits
            return finish({{"question", format_key(cfg_.question_format, *key)}});
        }
        auto lines = view.all_sentences();
        std::string head = lines.empty() ? "these passages" :
                                           "\"" + first_words(lines.front().second, 4) + "\"";
        return finish({{"question", "How do the two passages about " + head + " relate?"}});
    }

    if (view.task == "label_sentences" || view.task == "annotate_window") {
        auto lines = view.all_sentences();
        if (lines.empty()) fail("mock llm: prompt lists no sentences");
        std::vector<int64_t> labels;
        if (auto key = first_capture(key_re, view.question))
            labels = needle_sentences(lines, *key);
        // labeling must return at least one sentence for the record to be
        // usable; annotation legitimately reports an empty window
        if (labels.empty() && view.task == "label_sentences") labels = {lines.front().first};
        return finish({{"relevant_sentences", labels}});
    }

    if (view.task == "answer_from_sentences") {
        auto lines = view.all_sentences();
        if (auto key = first_capture(key_re, view.question)) {
            std::string token = format_key(cfg_.needle_format, *key);
            for (const auto& [idx, text] : lines)
                if (text.find(token) != std::string::npos)
                    return finish({{"answer", format_key(cfg_.answer_format, *key)}});
        }
        return finish({{"answer", "unknown"}});
    }

    fail("mock llm: unrecognized task header in prompt");
}

HttpLlmConfig parse_llm_url(const std::string& url) {
    static const std::regex re(R"(^http://([^:/]+)(?::(\d+))?(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) fail("unsupported llm url (need http://host[:port][/path]): " + url);
    HttpLlmConfig cfg;
    cfg.host = m[1].str();
    cfg.port = m[2].matched ? std::stoi(m[2].str()) : 80;
    if (m[3].matched && m[3].length() > 0) cfg.path = m[3].str();
    return cfg;
}

HttpLlmClient::HttpLlmClient(HttpLlmConfig cfg) : cfg_(std::move(cfg)) {}

std::string HttpLlmClient::complete(const std::string& prompt) {
    httplib::Client client(cfg_.host, cfg_.port);
    client.set_connection_timeout(cfg_.timeout_seconds, 0);
    client.set_read_timeout(cfg_.timeout_seconds, 0);

    nlohmann::json body = {{"model", cfg_.model},
                           {"prompt", prompt},
                           {"temperature", cfg_.temperature},
                           {"max_tokens", cfg_.max_tokens}};
    auto res = client.Post(cfg_.path, body.dump(), "application/json");
    if (!res)
        fail("llm request to " + cfg_.host + ":" + std::to_string(cfg_.port) +
             " failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        fail("llm request returned status " + std::to_string(res->status) + ": " + res->body);
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(res->body);
    } catch (const std::exception& e) {
        fail(std::string("llm response is not json: ") + e.what());
    }
    if (!parsed.contains("completion") || !parsed["completion"].is_string())
        fail("llm response missing string field 'completion'");
    return parsed["completion"].get<std::string>();
}

}  // namespace spscan
