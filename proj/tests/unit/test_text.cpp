#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "ws4a/error.hpp"
#include "ws4a/text.hpp"

using namespace ws4a;

TEST_CASE("utf8 round trip counts scalar values") {
    const std::string text = "TGF-\xCE\xB2 and \xF0\x9F\x98\x80!";
    const auto decoded = utf8_decode(text);
    CHECK(decoded.size() == 12);
    CHECK(decoded[4] == U'β');
    CHECK(utf8_encode(decoded) == text);
    CHECK(utf8_length(text) == 12);
    CHECK(utf8_slice(text, 4, 5) == "\xCE\xB2");
    CHECK(utf8_slice(text, 10, 99) == "\xF0\x9F\x98\x80!");
    CHECK(utf8_slice(text, 5, 5).empty());
}

TEST_CASE("invalid utf8 becomes replacement characters") {
    CHECK(utf8_decode("a\xFF" "b") == U"a�b");
    CHECK(utf8_decode("\xC0\x80") == U"��");   // overlong NUL
    CHECK(utf8_decode("\xE2\x82") == U"��");   // truncated
    CHECK(utf8_decode("\xED\xA0\x80").front() == U'�');  // surrogate
}

TEST_CASE("tokenize lowercases and splits on punctuation") {
    CHECK(token_strings("Is TGF-beta1 up-regulated?") ==
          std::vector<std::string>{"is", "tgf", "beta1", "up", "regulated"});
    CHECK(token_strings("\xCE\x92-cells") == std::vector<std::string>{"\xCE\xB2", "cells"});
    const auto tokens = tokenize("a b");
    REQUIRE(tokens.size() == 2);
    CHECK(tokens[1].position == 1);
    CHECK(token_strings("  ...  ").empty());
}

TEST_CASE("tokenize agrees with a regex tokenizer on random ASCII") {
    std::mt19937_64 rng(7);
    const std::string alphabet = "abcXYZ019 .,;-()\t\n/'";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), length(0, 60);
    for (int round = 0; round < 300; ++round) {
        std::string text;
        for (std::size_t i = length(rng); i > 0; --i) text.push_back(alphabet[pick(rng)]);
        CHECK(token_strings(text) == oracle::ascii_tokens(text));
    }
}

TEST_CASE("word spans use scalar offsets") {
    const auto spans = word_spans(utf8_decode("\xCE\xB1 x"));
    REQUIRE(spans.size() == 2);
    CHECK(spans[0].begin == 0);
    CHECK(spans[0].end == 1);
    CHECK(spans[1].begin == 2);
}

TEST_CASE("ngrams are grouped by length") {
    const std::vector<std::string> tokens{"a", "b", "c"};
    CHECK(ngrams(tokens, 2) == std::vector<std::string>{"a", "b", "c", "a b", "b c"});
    CHECK(ngrams(tokens, 5).size() == 6);
    CHECK(ngrams(std::vector<std::string>{}, 2).empty());
    CHECK_THROWS_AS(ngrams(tokens, 0), Error);
}

TEST_CASE("case folding covers Latin-1 and Greek") {
    CHECK(to_lower("\xC3\x89TUDE \xCE\x91") == "\xC3\xA9tude \xCE\xB1");
    CHECK(fold_case(U'×') == U'×');
}

TEST_CASE("trim and join") {
    CHECK(trim("  x y \n") == "x y");
    CHECK(trim("   ").empty());
    CHECK(join({"a", "b", "c"}, ", ") == "a, b, c");
    CHECK(join({}, ",").empty());
}
