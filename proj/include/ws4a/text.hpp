#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ws4a {

// Offsets throughout the library count Unicode scalar values, not bytes.
// Invalid UTF-8 sequences decode to U+FFFD.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);
std::size_t utf8_length(std::string_view text);

/// Slice [begin, end) in scalar-value offsets; clamps to the text length.
std::string utf8_slice(std::string_view text, std::size_t begin, std::size_t end);

bool is_word_char(char32_t c);
char32_t fold_case(char32_t c);
std::u32string fold_case(std::u32string_view text);
std::string to_lower(std::string_view text);

struct Token {
    std::string surface;
    std::size_t position = 0;

    bool operator==(const Token&) const = default;
};

/// A maximal run of word characters, with its scalar-value span.
struct WordSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

std::vector<WordSpan> word_spans(std::u32string_view text);

/// Lowercase, split on every run of non-alphanumeric characters.
std::vector<Token> tokenize(std::string_view text);
std::vector<std::string> token_strings(std::string_view text);

/// All contiguous n-grams for 1 <= n <= n_max, space-joined, grouped by n.
std::vector<std::string> ngrams(const std::vector<Token>& tokens, std::size_t n_max);
std::vector<std::string> ngrams(const std::vector<std::string>& tokens, std::size_t n_max);

std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string_view trim(std::string_view text);

}  // namespace ws4a
