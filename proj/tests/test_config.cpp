#include <fstream>

#include "doctest.h"
#include "spscan/config.hpp"
#include "support.hpp"

using namespace spscan;

TEST_CASE("kv_config parses sections, comments, quotes, arrays") {
    const char* text = R"(
# top comment
title = "hello # not a comment"
count = 42   # trailing
ratio = 2.5
flag = true
empty_list = []
ks = [1, 5, 10]
names = ["a", "b,c"]
[model]
channels = 32
[train]
peak_lr = 1e-2
)";
    auto cfg = kv_config::parse_text(text, "inline");
    CHECK(cfg.get_string("title") == "hello # not a comment");
    CHECK(cfg.get_int("count") == 42);
    CHECK(cfg.get_double("ratio") == 2.5);
    CHECK(cfg.get_bool("flag"));
    CHECK(cfg.get_list("empty_list").empty());
    auto ks = cfg.get_list("ks");
    REQUIRE(ks.size() == 3);
    CHECK(ks[1] == "5");
    auto names = cfg.get_list("names");
    CHECK(names[0] == "a");
    // section prefixes become dotted keys
    CHECK(cfg.get_int("model.channels") == 32);
    CHECK(cfg.get_double("train.peak_lr") == 1e-2);
    CHECK(cfg.has("train.peak_lr"));
    CHECK_FALSE(cfg.has("train.min_lr"));
}

TEST_CASE("kv_config fallback overloads and typed errors") {
    auto cfg = kv_config::parse_text("x = 7\ns = word\n", "inline");
    CHECK(cfg.get_int("missing", 3) == 3);
    CHECK(cfg.get_double("missing", 0.5) == 0.5);
    CHECK(cfg.get_string("missing", "d") == "d");
    CHECK(cfg.get_bool("missing", true));
    CHECK_THROWS_AS(cfg.get_string("missing"), error);
    CHECK_THROWS_AS(cfg.get_int("s"), error);
    CHECK_THROWS_AS(cfg.get_double("s"), error);
    CHECK_THROWS_AS(cfg.get_bool("x"), error);
}

TEST_CASE("kv_config rejects malformed lines with file:line context") {
    CHECK_THROWS_AS(kv_config::parse_text("[unterminated\n", "f"), error);
    CHECK_THROWS_AS(kv_config::parse_text("[]\n", "f"), error);
    CHECK_THROWS_AS(kv_config::parse_text("novalue\n", "f"), error);
    CHECK_THROWS_AS(kv_config::parse_text("= 1\n", "f"), error);
    CHECK_THROWS_AS(kv_config::parse_text("k =\n", "f"), error);
    CHECK_THROWS_AS(kv_config::parse_text("k = [1, 2\n", "f"), error);
    CHECK_THROWS_AS(kv_config::parse_text("k = \"bad \\q escape\"\n", "f"), error);
    try {
        kv_config::parse_text("ok = 1\nbroken\n", "cfg.toml");
        FAIL("expected parse error");
    } catch (const error& e) {
        CHECK(std::string(e.what()).find("cfg.toml:2") != std::string::npos);
    }
}

TEST_CASE("kv_config escape sequences inside quoted strings") {
    auto cfg = kv_config::parse_text(R"(s = "a\nb\t\"c\\d")" "\n", "inline");
    CHECK(cfg.get_string("s") == "a\nb\t\"c\\d");
}

TEST_CASE("set overrides and entries round-trips through parse") {
    auto cfg = kv_config::parse_text("a = 1\n", "inline");
    cfg.set("a", "2");
    cfg.set("b.c", "x y");
    CHECK(cfg.get_int("a") == 2);
    CHECK(cfg.get_string("b.c") == "x y");
    CHECK(cfg.entries().size() == 2);
}

TEST_CASE("manifest writes readable key = value lines, atomically") {
    testing::temp_dir dir("manifest");
    manifest m;
    m.add("tool", std::string("spscan"));
    m.add("seed", int64_t{17});
    m.add("threshold", 0.01);
    m.add("note", std::string("quote \" and backslash \\ survive"));
    auto path = dir / "out.manifest.toml";
    m.write(path);

    auto cfg = kv_config::parse_file(path);
    CHECK(cfg.get_string("tool") == "spscan");
    CHECK(cfg.get_int("seed") == 17);
    CHECK(cfg.get_double("threshold") == 0.01);
    CHECK(cfg.get_string("note") == "quote \" and backslash \\ survive");
}

TEST_CASE("file_digest is content-determined and sensitive to single bytes") {
    testing::temp_dir dir("digest");
    auto p1 = dir / "a.bin";
    auto p2 = dir / "b.bin";
    std::ofstream(p1) << "identical payload";
    std::ofstream(p2) << "identical payload";
    CHECK(file_digest(p1) == file_digest(p2));
    std::ofstream(p2, std::ios::app) << "!";
    CHECK(file_digest(p1) != file_digest(p2));
    CHECK_THROWS_AS(file_digest(dir / "missing.bin"), error);
}
