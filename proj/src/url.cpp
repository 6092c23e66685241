#include "ws4a/url.hpp"

#include <charconv>

#include "ws4a/error.hpp"

namespace ws4a {

namespace {

constexpr char kHex[] = "0123456789ABCDEF";

bool is_unreserved(unsigned char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
           c == '.' || c == '_' || c == '~';
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

std::string encode(std::string_view text, bool space_as_plus) {
    std::string out;
    out.reserve(text.size() * 3);
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_unreserved(c)) {
            out.push_back(ch);
        } else if (c == ' ' && space_as_plus) {
            out.push_back('+');
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 0x0F]);
        }
    }
    return out;
}

}  // namespace

std::string percent_encode(std::string_view text) { return encode(text, false); }

std::string form_encode(std::string_view text) { return encode(text, true); }

std::string percent_decode(std::string_view text, bool plus_is_space) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '%' && i + 2 < text.size()) {
            const int hi = hex_value(text[i + 1]);
            const int lo = hex_value(text[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out.push_back(static_cast<char>(hi * 16 + lo));
                i += 2;
                continue;
            }
        }
        out.push_back(plus_is_space && text[i] == '+' ? ' ' : text[i]);
    }
    return out;
}

std::string ParsedUrl::origin() const {
    std::string out = scheme + "://" + host;
    const int default_port = scheme == "https" ? 443 : 80;
    if (port != default_port) out += ":" + std::to_string(port);
    return out;
}

std::string ParsedUrl::path_and_query() const { return query.empty() ? path : path + "?" + query; }

std::vector<std::string> ParsedUrl::path_segments() const {
    std::vector<std::string> out;
    std::size_t start = 1;
    while (start <= path.size()) {
        auto slash = path.find('/', start);
        if (slash == std::string::npos) slash = path.size();
        out.push_back(percent_decode(std::string_view(path).substr(start, slash - start)));
        start = slash + 1;
    }
    return out;
}

ParsedUrl parse_url(std::string_view url) {
    ParsedUrl out;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) fail(ErrorKind::MalformedUrl, "not an absolute URL: " + std::string(url));
    out.scheme = std::string(url.substr(0, scheme_end));
    if (out.scheme != "http" && out.scheme != "https")
        fail(ErrorKind::MalformedUrl, "unsupported scheme in " + std::string(url));
    auto rest = url.substr(scheme_end + 3);
    const auto authority_end = rest.find_first_of("/?#");
    auto authority = rest.substr(0, authority_end);
    rest = authority_end == std::string_view::npos ? std::string_view{} : rest.substr(authority_end);
    if (authority.empty() || authority.find_first_of(" \t@") != std::string_view::npos)
        fail(ErrorKind::MalformedUrl, "bad host in " + std::string(url));
    out.port = out.scheme == "https" ? 443 : 80;
    if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
        const auto port_text = authority.substr(colon + 1);
        auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), out.port);
        if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || out.port <= 0 || out.port > 65535)
            fail(ErrorKind::MalformedUrl, "bad port in " + std::string(url));
        authority = authority.substr(0, colon);
    }
    out.host = std::string(authority);
    if (auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
    const auto question = rest.find('?');
    out.path = std::string(rest.substr(0, question));
    if (out.path.empty()) out.path = "/";
    if (question != std::string_view::npos) out.query = std::string(rest.substr(question + 1));
    for (char c : url)
        if (static_cast<unsigned char>(c) <= 0x20 || c == 0x7F)
            fail(ErrorKind::MalformedUrl, "unescaped control or space character in " + std::string(url));
    return out;
}

bool is_absolute_url(std::string_view url) {
    try {
        parse_url(url);
        return true;
    } catch (const Error&) {
        return false;
    }
}

}  // namespace ws4a
