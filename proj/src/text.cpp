#include "ws4a/text.hpp"

#include "ws4a/error.hpp"

#include <algorithm>

namespace ws4a {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

void append_utf8(std::string& out, char32_t c) {
    if (c < 0x80) {
        out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (c >> 6)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (c >> 12)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (c >> 18)));
        out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
}

}  // namespace

std::u32string utf8_decode(std::string_view text) {
    std::u32string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const auto lead = static_cast<unsigned char>(text[i]);
        std::size_t extra = 0;
        char32_t c = 0;
        if (lead < 0x80) {
            c = lead;
        } else if ((lead & 0xE0) == 0xC0) {
            extra = 1;
            c = lead & 0x1F;
        } else if ((lead & 0xF0) == 0xE0) {
            extra = 2;
            c = lead & 0x0F;
        } else if ((lead & 0xF8) == 0xF0) {
            extra = 3;
            c = lead & 0x07;
        } else {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        bool ok = true;
        for (std::size_t k = 1; k <= extra; ++k) {
            if (i + k >= text.size()) {
                ok = false;
                break;
            }
            const auto cont = static_cast<unsigned char>(text[i + k]);
            if ((cont & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            c = (c << 6) | (cont & 0x3F);
        }
        const bool overlong = (extra == 1 && c < 0x80) || (extra == 2 && c < 0x800) ||
                              (extra == 3 && c < 0x10000);
        if (!ok || overlong || c > 0x10FFFF || (c >= 0xD800 && c <= 0xDFFF)) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        out.push_back(c);
        i += extra + 1;
    }
    return out;
}

std::string utf8_encode(std::u32string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char32_t c : text) append_utf8(out, c);
    return out;
}

std::size_t utf8_length(std::string_view text) { return utf8_decode(text).size(); }

std::string utf8_slice(std::string_view text, std::size_t begin, std::size_t end) {
    const auto decoded = utf8_decode(text);
    end = std::min(end, decoded.size());
    if (begin >= end) return {};
    return utf8_encode(std::u32string_view(decoded).substr(begin, end - begin));
}

bool is_word_char(char32_t c) {
    if (c < 0x80) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    }
    if (c <= 0xBF) return c == 0xAA || c == 0xB5 || c == 0xBA;
    if (c == 0xD7 || c == 0xF7) return false;
    if (c >= 0x2000 && c <= 0x2BFF) return false;
    if (c >= 0x3000 && c <= 0x303F) return false;
    if (c >= 0xFE30 && c <= 0xFE4F) return false;
    if (c >= 0xFF00 && c <= 0xFF0F) return false;
    if (c == kReplacement || c == 0xFEFF) return false;
    return true;
}

char32_t fold_case(char32_t c) {
    if (c >= 'A' && c <= 'Z') return c + 32;
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
    if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;
    if (c >= 0x410 && c <= 0x42F) return c + 32;
    return c;
}

std::u32string fold_case(std::u32string_view text) {
    std::u32string out(text);
    for (auto& c : out) c = fold_case(c);
    return out;
}

std::string to_lower(std::string_view text) { return utf8_encode(fold_case(utf8_decode(text))); }

std::vector<WordSpan> word_spans(std::u32string_view text) {
    std::vector<WordSpan> spans;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_word_char(text[i])) {
            ++i;
            continue;
        }
        const std::size_t begin = i;
        while (i < text.size() && is_word_char(text[i])) ++i;
        spans.push_back({begin, i});
    }
    return spans;
}

std::vector<Token> tokenize(std::string_view text) {
    const auto decoded = utf8_decode(text);
    const std::u32string_view view(decoded);
    std::vector<Token> tokens;
    for (const auto& span : word_spans(view)) {
        tokens.push_back({utf8_encode(fold_case(view.substr(span.begin, span.end - span.begin))),
                          tokens.size()});
    }
    return tokens;
}

std::vector<std::string> token_strings(std::string_view text) {
    std::vector<std::string> out;
    for (auto& token : tokenize(text)) out.push_back(std::move(token.surface));
    return out;
}

std::vector<std::string> ngrams(const std::vector<std::string>& tokens, std::size_t n_max) {
    if (n_max < 1) fail(ErrorKind::InvalidArgument, "ngrams: n_max must be >= 1");
    std::vector<std::string> out;
    for (std::size_t n = 1; n <= n_max && n <= tokens.size(); ++n) {
        for (std::size_t start = 0; start + n <= tokens.size(); ++start) {
            std::string gram = tokens[start];
            for (std::size_t k = 1; k < n; ++k) {
                gram.push_back(' ');
                gram += tokens[start + k];
            }
            out.push_back(std::move(gram));
        }
    }
    return out;
}

std::vector<std::string> ngrams(const std::vector<Token>& tokens, std::size_t n_max) {
    std::vector<std::string> surfaces;
    surfaces.reserve(tokens.size());
    for (const auto& token : tokens) surfaces.push_back(token.surface);
    return ngrams(surfaces, n_max);
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

std::string_view trim(std::string_view text) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
    while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
    while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
    return text;
}

}  // namespace ws4a
