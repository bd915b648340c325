#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace spscan {

class LlmClient {
public:
    virtual ~LlmClient() = default;
    // Returns the raw completion text. Throws spscan::error on transport or
    // protocol failure; malformed content is the caller's problem to retry.
    virtual std::string complete(const std::string& prompt) = 0;
};

// Pulls the first ```-fenced block (``` or ```json) out of a completion and
// parses it; falls back to the whole trimmed text when no fence is present.
// One repair is attempted: stripping trailing commas before } or ].
// Returns std::nullopt and fills `why` when nothing parseable remains.
std::optional<nlohmann::json> extract_fenced_json(const std::string& completion,
                                                  std::string* why = nullptr);

// Rule-driven stand-in for a real model. Prompts carry a TASK: header and
// sentences rendered as "[index] text" lines; responses follow the fixture
// convention that a document needle (e.g. "beacon07") pairs with a query
// key (e.g. "anchor07") sharing the same digits.
struct MockLlmConfig {
    std::string needle_regex = R"(beacon(\d+))";     // matched inside sentences
    std::string query_key_regex = R"(anchor(\d+))";  // matched inside questions
    std::string question_format = "Which part of the document relates to anchor{}?";
    std::string needle_format = "beacon{}";
    std::string answer_format = "beacon{}";
    int fail_first_n = 0;        // first n calls return unparseable text
    bool trailing_commas = false;  // emit JSON that needs the comma repair
};

class MockLlmClient : public LlmClient {
public:
    explicit MockLlmClient(MockLlmConfig cfg = {});
    std::string complete(const std::string& prompt) override;

    int64_t calls() const { return calls_; }

private:
    MockLlmConfig cfg_;
    int64_t calls_ = 0;

    std::string respond(const std::string& prompt) const;
    std::string finish(nlohmann::json payload) const;
};

// POSTs {"model", "prompt", "temperature", "max_tokens"} as JSON and expects
// {"completion": "..."} back.
struct HttpLlmConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string path = "/v1/complete";
    std::string model = "default";
    double temperature = 0.0;
    int max_tokens = 1024;
    int timeout_seconds = 60;
};

HttpLlmConfig parse_llm_url(const std::string& url);  // http://host:port/path

class HttpLlmClient : public LlmClient {
public:
    explicit HttpLlmClient(HttpLlmConfig cfg);
    std::string complete(const std::string& prompt) override;

private:
    HttpLlmConfig cfg_;
};

}  // namespace spscan
