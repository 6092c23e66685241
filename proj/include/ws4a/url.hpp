#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ws4a {

/// RFC 3986 percent-encoding; only unreserved characters pass through.
std::string percent_encode(std::string_view text);
/// application/x-www-form-urlencoded: like percent_encode but space -> '+'.
std::string form_encode(std::string_view text);
/// Inverse of both encoders ('+' decodes to space only when `plus_is_space`).
std::string percent_decode(std::string_view text, bool plus_is_space = false);

struct ParsedUrl {
    std::string scheme;
    std::string host;
    int port = 0;
    std::string path;   // still encoded, starts with '/'
    std::string query;  // still encoded, without '?'

    std::string origin() const;  // scheme://host[:port]
    std::string path_and_query() const;
    std::vector<std::string> path_segments() const;  // decoded
};

/// Throws MalformedUrl unless the text is an absolute http(s) URL.
ParsedUrl parse_url(std::string_view url);
bool is_absolute_url(std::string_view url);

}  // namespace ws4a
