#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ws4a {

enum class HttpMethod { Get, Post };
enum class Service { Annotator, EutilsSearch, EutilsFetch, Pubchem, Uniprot, Whatizit, Sparql };

std::string_view to_string(HttpMethod method);
std::string_view to_string(Service service);

struct ServiceRequest {
    HttpMethod method = HttpMethod::Get;
    std::string url;
    std::optional<std::string> body;
    Service service = Service::Annotator;
    /// Sent on the wire but not part of the cache key.
    std::vector<std::pair<std::string, std::string>> headers;
};

/// Throws InvalidArgument for a relative URL or a GET with a body.
void validate(const ServiceRequest& request);

struct HttpResponse {
    int status = 200;
    std::string content_type;
    std::string body;
};

/// Hex SHA-256 over method, URL and body; identical requests share a key.
std::string request_key(const ServiceRequest& request);

class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse send(const ServiceRequest& request) = 0;
};

struct CacheEntry {
    std::string key;
    std::string method;
    std::string url;
    int status = 200;
    std::string content_type;
    std::string recorded_at;  // ISO-8601 UTC
    std::string response_bytes;
};

/// On-disk fixture store: `<key>.meta.json` plus `<key>.body` per entry.
class FixtureStore {
public:
    explicit FixtureStore(std::filesystem::path directory);

    const std::filesystem::path& directory() const { return directory_; }

    /// Reads every entry; throws Parse on a damaged entry.
    std::map<std::string, CacheEntry> load_all() const;
    std::optional<CacheEntry> read(const std::string& key) const;
    /// Serialized across threads; overwrites an existing entry.
    void write(const CacheEntry& entry);
    bool remove(const std::string& key);

private:
    std::filesystem::path directory_;
    std::mutex write_mutex_;
};

/// Immutable in-memory view of a store, loaded once for replay.
class ReplayTransport : public Transport {
public:
    explicit ReplayTransport(std::map<std::string, CacheEntry> entries);
    static std::unique_ptr<ReplayTransport> from_store(const FixtureStore& store);

    HttpResponse send(const ServiceRequest& request) override { return lookup(request); }
    /// Throws ReplayMiss with the computed key and URL.
    HttpResponse lookup(const ServiceRequest& request) const;
    std::size_t size() const { return entries_.size(); }

private:
    const std::map<std::string, CacheEntry> entries_;
};

/// Forwards to `network` and persists every response it gets back.
class RecordingTransport : public Transport {
public:
    using Clock = std::function<std::string()>;

    RecordingTransport(Transport& network, FixtureStore& store, Clock clock = {});
    HttpResponse send(const ServiceRequest& request) override;

private:
    Transport& network_;
    FixtureStore& store_;
    Clock clock_;
};

/// Replays like ReplayTransport but logs each miss and reports it as a
/// transport failure so callers degrade and keep going.
class VerifyingTransport : public Transport {
public:
    explicit VerifyingTransport(const ReplayTransport& replay);
    HttpResponse send(const ServiceRequest& request) override;
    std::vector<std::pair<std::string, std::string>> misses() const;  // (key, url)

private:
    const ReplayTransport& replay_;
    mutable std::mutex mutex_;
    std::vector<std::pair<std::string, std::string>> misses_;
};

/// Fails every call; counts the attempts. Stands in for the network where
/// none may be touched.
class FailOnUseTransport : public Transport {
public:
    HttpResponse send(const ServiceRequest& request) override;
    std::size_t calls() const { return calls_.load(); }

private:
    std::atomic<std::size_t> calls_{0};
};

struct HttpOptions {
    std::chrono::milliseconds min_delay{350};
    int retries = 3;
    std::chrono::seconds timeout{60};
    /// Extra header sent with every request, e.g. an API-key header.
    std::vector<std::pair<std::string, std::string>> headers;
};

/// Live HTTP(S). Enforces a minimum delay between requests to the same
/// service and retries connection failures and 5xx responses.
class HttpTransport : public Transport {
public:
    explicit HttpTransport(HttpOptions options = {});
    HttpResponse send(const ServiceRequest& request) override;

private:
    void wait_turn(Service service);

    HttpOptions options_;
    std::mutex rate_mutex_;
    std::map<Service, std::chrono::steady_clock::time_point> next_allowed_;
};

enum class GatewayMode { Record, Replay, Passthrough };

std::string_view to_string(GatewayMode mode);
GatewayMode parse_gateway_mode(std::string_view text);

std::string utc_timestamp();

}  // namespace ws4a
