#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <thread>

#include "ws4a/error.hpp"
#include "ws4a/transport.hpp"
#include "ws4a/url.hpp"

namespace ws4a {

HttpTransport::HttpTransport(HttpOptions options) : options_(std::move(options)) {}

void HttpTransport::wait_turn(Service service) {
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(rate_mutex_);
        const auto now = std::chrono::steady_clock::now();
        auto& next = next_allowed_[service];
        slot = std::max(now, next);
        next = slot + options_.min_delay;
    }
    std::this_thread::sleep_until(slot);
}

HttpResponse HttpTransport::send(const ServiceRequest& request) {
    validate(request);
    const ParsedUrl url = parse_url(request.url);

    httplib::Client client(url.origin());
    client.set_follow_location(true);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    httplib::Headers headers;
    for (const auto& [name, value] : options_.headers) headers.emplace(name, value);
    for (const auto& [name, value] : request.headers) headers.emplace(name, value);

    std::string last_error;
    for (int attempt = 0; attempt < std::max(1, options_.retries); ++attempt) {
        wait_turn(request.service);
        httplib::Result result =
            request.method == HttpMethod::Get
                ? client.Get(url.path_and_query(), headers)
                : client.Post(url.path_and_query(), headers, request.body.value_or(""),
                              "text/plain; charset=utf-8");
        if (!result) {
            last_error = httplib::to_string(result.error());
            continue;
        }
        if (result->status >= 500) {
            last_error = "HTTP " + std::to_string(result->status);
            continue;
        }
        return {result->status, result->get_header_value("Content-Type"), result->body};
    }
    fail(ErrorKind::Transport, std::string(to_string(request.service)) + " request failed after " +
                                   std::to_string(options_.retries) + " attempts (" + last_error +
                                   "): " + request.url);
}

}  // namespace ws4a
