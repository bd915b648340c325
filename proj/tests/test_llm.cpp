#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "spscan/llm_client.hpp"
#include "spscan/prompts.hpp"
#include "spscan/prompts_data.hpp"
#include "support.hpp"

using namespace spscan;

TEST_CASE("extract_fenced_json handles fences, bare json, and repairs") {
    std::string why;
    auto fenced = extract_fenced_json("Sure!\n```json\n{\"a\": 1}\n```\nDone.", &why);
    REQUIRE(fenced.has_value());
    CHECK((*fenced)["a"] == 1);

    auto plain_fence = extract_fenced_json("```\n[1, 2, 3]\n```", &why);
    REQUIRE(plain_fence.has_value());
    CHECK(plain_fence->size() == 3);

    auto bare = extract_fenced_json("  {\"ok\": true}  ", &why);
    REQUIRE(bare.has_value());
    CHECK((*bare)["ok"] == true);

    // single repair pass: trailing commas before } or ]
    auto repaired = extract_fenced_json("```json\n{\"xs\": [1, 2,], }\n```", &why);
    REQUIRE(repaired.has_value());
    CHECK((*repaired)["xs"].size() == 2);
}

TEST_CASE("extract_fenced_json reports why it failed") {
    std::string why;
    CHECK_FALSE(extract_fenced_json("no structured output here", &why).has_value());
    CHECK(why.find("does not look like json") != std::string::npos);

    CHECK_FALSE(extract_fenced_json("```json\n{\"a\": 1}", &why).has_value());
    CHECK(why == "unterminated code fence");

    CHECK_FALSE(extract_fenced_json("```json\n{broken: [}\n```", &why).has_value());
    CHECK_FALSE(why.empty());

    // null out-param is allowed
    CHECK_FALSE(extract_fenced_json("nothing", nullptr).has_value());
}

namespace {

Document beacon_doc() {
    // needle token beacon07 in sentence 2, beacon03 in sentence 5
    std::string text =
        "plain filler sentence one. more filler text here. the beacon07 hides in this line. "
        "another ordinary sentence. padding before the second marker. beacon03 appears right "
        "here. closing filler sentence.";
    return make_document("bd", text, SourceTag::other);
}

json mock_json(MockLlmClient& llm, const std::string& prompt) {
    std::string why;
    auto parsed = extract_fenced_json(llm.complete(prompt), &why);
    REQUIRE_MESSAGE(parsed.has_value(), why);
    return *parsed;
}

}  // namespace

TEST_CASE("mock answers chunk prompts: needle-keyed when a needle is present") {
    Document doc = beacon_doc();
    MockLlmClient llm;
    std::string prompt = prompts::render(
        prompts::question_from_chunk,
        {{"SENTENCES", prompts::render_sentences(doc, 0, doc.sentence_count())}});
    json j = mock_json(llm, prompt);
    CHECK(j["question"].get<std::string>().find("anchor07") != std::string::npos);
    CHECK(j["relevant_sentences"] == json::array({2}));
    CHECK(llm.calls() == 1);
}

TEST_CASE("mock falls back to a generic question without needles") {
    Document doc = make_document("p", "just regular words here. nothing special at all.",
                                 SourceTag::other);
    MockLlmClient llm;
    std::string prompt = prompts::render(
        prompts::question_from_chunk,
        {{"SENTENCES", prompts::render_sentences(doc, 0, 2)}});
    json j = mock_json(llm, prompt);
    CHECK(j["question"].get<std::string>().find("just regular words") != std::string::npos);
    CHECK(j["relevant_sentences"] == json::array({0}));
}

TEST_CASE("mock pair prompts label the lead sentence of both chunks") {
    Document doc = make_document(
        "pp", "first chunk opener. first chunk body. second chunk opener. second chunk body.",
        SourceTag::other);
    MockLlmClient llm;
    std::string prompt = prompts::render(
        prompts::question_from_pair,
        {{"CHUNK_A", prompts::render_sentences(doc, 0, 2)},
         {"CHUNK_B", prompts::render_sentences(doc, 2, 4)}});
    json j = mock_json(llm, prompt);
    CHECK(j["relevant_sentences"] == json::array({0, 2}));
}

TEST_CASE("mock find_connections links context passages sharing a needle key") {
    std::string text;
    for (int i = 0; i < 40; ++i) {
        if (i == 3) text += "the beacon05 sits in the initial chunk. ";
        else if (i == 30) text += "a matching beacon05 reappears much later. ";
        else text += "ordinary filler sentence number " + std::to_string(i) + ". ";
    }
    Document doc = make_document("lk", text, SourceTag::other);
    MockLlmClient llm;
    std::string prompt = prompts::render(
        prompts::find_connections,
        {{"INITIAL_CHUNK", prompts::render_sentences(doc, 0, 6)},
         {"CONTEXT", prompts::render_sentences(doc, 0, 40)}});
    json j = mock_json(llm, prompt);
    REQUIRE(j["links"].is_array());
    REQUIRE_FALSE(j["links"].empty());
    const json& link = j["links"][0];
    CHECK(link["start_sentence"] == 21);  // 30 - 9
    CHECK(link["end_sentence"] == 40);    // 30 + 11 clamped to the context end
    CHECK(link["connection"].get<std::string>().find("beacon05") != std::string::npos);
}

TEST_CASE("mock find_connections falls back to the adjacent passage") {
    Document doc = make_document(
        "adj",
        "one plain line. two plain lines. three plain lines. four plain lines. five plain "
        "lines. six plain lines. seven plain lines. eight plain lines.",
        SourceTag::other);
    MockLlmClient llm;
    std::string prompt = prompts::render(
        prompts::find_connections,
        {{"INITIAL_CHUNK", prompts::render_sentences(doc, 0, 2)},
         {"CONTEXT", prompts::render_sentences(doc, 0, 8)}});
    json j = mock_json(llm, prompt);
    REQUIRE(j["links"].size() == 1);
    CHECK(j["links"][0]["start_sentence"] == 2);
    CHECK(j["links"][0]["end_sentence"] == 8);
    CHECK(j["links"][0]["connection"] == "adjacent passage");
}

TEST_CASE("mock labels sentences matching the question's key") {
    Document doc = beacon_doc();
    MockLlmClient llm;
    std::string prompt = prompts::render(
        prompts::label_sentences,
        {{"QUESTION", "Which part of the document relates to anchor03?"},
         {"CHUNK_A", prompts::render_sentences(doc, 0, 4)},
         {"CHUNK_B", prompts::render_sentences(doc, 4, 7)}});
    json j = mock_json(llm, prompt);
    CHECK(j["relevant_sentences"] == json::array({5}));
}

TEST_CASE("mock answers with the needle token or the word unknown") {
    Document doc = beacon_doc();
    MockLlmClient llm;
    std::string with = prompts::render(
        prompts::answer_from_sentences,
        {{"QUESTION", "Which part of the document relates to anchor07?"},
         {"SENTENCES", prompts::render_sentences(doc, 0, 4)}});
    CHECK(mock_json(llm, with)["answer"] == "beacon07");

    std::string without = prompts::render(
        prompts::answer_from_sentences,
        {{"QUESTION", "Which part of the document relates to anchor07?"},
         {"SENTENCES", prompts::render_sentences(doc, 4, 7)}});
    CHECK(mock_json(llm, without)["answer"] == "unknown");
}

TEST_CASE("mock trailing-comma mode still parses through the repair pass") {
    MockLlmConfig cfg;
    cfg.trailing_commas = true;
    MockLlmClient llm(cfg);
    Document doc = beacon_doc();
    std::string prompt = prompts::render(
        prompts::question_from_chunk,
        {{"SENTENCES", prompts::render_sentences(doc, 0, 3)}});
    json j = mock_json(llm, prompt);
    CHECK(j.contains("question"));
}

TEST_CASE("mock fail_first_n yields unparseable completions, then recovers") {
    MockLlmConfig cfg;
    cfg.fail_first_n = 2;
    MockLlmClient llm(cfg);
    std::string why;
    CHECK_FALSE(extract_fenced_json(llm.complete("TASK: question_from_chunk\n[0] a line."),
                                    &why).has_value());
    CHECK_FALSE(extract_fenced_json(llm.complete("TASK: question_from_chunk\n[0] a line."),
                                    &why).has_value());
    CHECK(extract_fenced_json(llm.complete(
                                  "TASK: question_from_chunk\nSENTENCES:\n[0] a line."),
                              &why).has_value());
    CHECK(llm.calls() == 3);
}

TEST_CASE("prompt templates render with exact markers; unused or missing keys throw") {
    CHECK_THROWS_AS(prompts::render("{{MISSING}} marker", {}), error);
    CHECK_THROWS_AS(prompts::render("no markers", {{"EXTRA", "x"}}), error);
    CHECK(prompts::render("a {{X}} b", {{"X", "mid"}}) == "a mid b");

    Document doc = make_document("r", "multi   word\tsentence. second one.", SourceTag::other);
    CHECK(prompts::render_sentences(doc, 0, 2) ==
          "[0] multi word sentence.\n[1] second one.\n");
    CHECK_THROWS_AS(prompts::render_sentences(doc, 0, 3), error);
}

TEST_CASE("parse_llm_url accepts http host/port/path forms") {
    HttpLlmConfig a = parse_llm_url("http://localhost:9000/v2/complete");
    CHECK(a.host == "localhost");
    CHECK(a.port == 9000);
    CHECK(a.path == "/v2/complete");

    HttpLlmConfig b = parse_llm_url("http://10.0.0.5");
    CHECK(b.host == "10.0.0.5");
    CHECK(b.port == 80);
    CHECK(b.path == "/v1/complete");  // default path preserved

    CHECK_THROWS_AS(parse_llm_url("https://secure.example"), error);
    CHECK_THROWS_AS(parse_llm_url("not a url"), error);
}

TEST_CASE("http client round-trips against a local server") {
    httplib::Server server;
    std::string seen_body;
    server.Post("/v1/complete", [&](const httplib::Request& req, httplib::Response& res) {
        seen_body = req.body;
        res.set_content("{\"completion\": \"```json\\n{\\\"a\\\": 1}\\n```\"}",
                        "application/json");
    });
    server.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
        res.status = 500;
        res.set_content("busy", "text/plain");
    });
    server.Post("/notjson", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("plain text", "text/plain");
    });
    server.Post("/nocompletion", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"other\": 1}", "application/json");
    });

    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread runner([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    HttpLlmConfig cfg;
    cfg.host = "127.0.0.1";
    cfg.port = port;
    cfg.model = "test-model";
    cfg.timeout_seconds = 5;

    HttpLlmClient client(cfg);
    std::string completion = client.complete("hello prompt");
    CHECK(completion.find("```json") != std::string::npos);
    json body = json::parse(seen_body);
    CHECK(body["prompt"] == "hello prompt");
    CHECK(body["model"] == "test-model");
    CHECK(body["temperature"] == 0.0);
    CHECK(body.contains("max_tokens"));

    HttpLlmConfig broken = cfg;
    broken.path = "/broken";
    CHECK_THROWS_AS(HttpLlmClient(broken).complete("x"), error);
    HttpLlmConfig notjson = cfg;
    notjson.path = "/notjson";
    CHECK_THROWS_AS(HttpLlmClient(notjson).complete("x"), error);
    HttpLlmConfig nocompletion = cfg;
    nocompletion.path = "/nocompletion";
    CHECK_THROWS_AS(HttpLlmClient(nocompletion).complete("x"), error);

    server.stop();
    runner.join();
}
