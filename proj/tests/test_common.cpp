#include <set>

#include "doctest.h"
#include "spscan/common.hpp"

using namespace spscan;

TEST_CASE("mix64 is a bijective scramble with no trivial fixed pattern") {
    CHECK(mix64(0) != 0);
    CHECK(mix64(1) != mix64(2));
    // splitmix64 reference value for input 0
    CHECK(mix64(0) == 0xe220a8397b1dcdafull);
}

TEST_CASE("fork_rng: same (seed, key) reproduces, different keys diverge") {
    auto a1 = fork_rng(42, "chunk:doc7");
    auto a2 = fork_rng(42, "chunk:doc7");
    auto b = fork_rng(42, "chunk:doc8");
    auto c = fork_rng(43, "chunk:doc7");
    for (int i = 0; i < 8; ++i) CHECK(a1() == a2());
    CHECK(fork_rng(42, "chunk:doc7")() != b());
    CHECK(fork_rng(42, "chunk:doc7")() != c());
    // string and integer keys are distinct stream families
    CHECK(fork_rng(42, "7")() != fork_rng(42, uint64_t{7})());
}

TEST_CASE("draw_u64 stays inside inclusive bounds and covers them") {
    auto rng = fork_rng(1, "draw");
    std::set<uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        uint64_t v = draw_u64(rng, 3, 9);
        CHECK(v >= 3);
        CHECK(v <= 9);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
    CHECK(draw_u64(rng, 5, 5) == 5);
    CHECK_THROWS_AS(draw_u64(rng, 6, 5), error);
}

TEST_CASE("draw_unit in [0,1), draw_normal roughly standard") {
    auto rng = fork_rng(2, "unit");
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        double u = draw_unit(rng);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        double g = draw_normal(rng);
        sum += g;
        sq += g * g;
    }
    double mean = sum / n;
    double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("string helpers") {
    CHECK(trim("  a b \t\n") == "a b");
    CHECK(trim("") == "");
    CHECK(trim(" \n ") == "");
    CHECK(collapse_whitespace("a\t b\n\nc") == "a b c");
    CHECK(to_lower("MiXeD 42") == "mixed 42");

    auto parts = split("a,b,,c", ',');
    REQUIRE(parts.size() == 4);
    CHECK(parts[0] == "a");
    CHECK(parts[2] == "");
    CHECK(split("", ',').size() == 1);
}
