#include "ws4a/transport.hpp"

#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ws4a/error.hpp"
#include "ws4a/hash.hpp"
#include "ws4a/url.hpp"

namespace ws4a {

namespace fs = std::filesystem;

std::string_view to_string(HttpMethod method) { return method == HttpMethod::Get ? "GET" : "POST"; }

std::string_view to_string(Service service) {
    switch (service) {
        case Service::Annotator: return "ANNOTATOR";
        case Service::EutilsSearch: return "EUTILS_SEARCH";
        case Service::EutilsFetch: return "EUTILS_FETCH";
        case Service::Pubchem: return "PUBCHEM";
        case Service::Uniprot: return "UNIPROT";
        case Service::Whatizit: return "WHATIZIT";
        case Service::Sparql: return "SPARQL";
    }
    return "ANNOTATOR";
}

void validate(const ServiceRequest& request) {
    if (!is_absolute_url(request.url))
        fail(ErrorKind::InvalidArgument, "request URL is not absolute: " + request.url);
    if (request.method == HttpMethod::Get && request.body)
        fail(ErrorKind::InvalidArgument, "GET request must not carry a body: " + request.url);
}

std::string request_key(const ServiceRequest& request) {
    // Length-prefixed fields keep (url, body) boundaries unambiguous.
    std::string material(to_string(request.method));
    material += '\n';
    material += std::to_string(request.url.size()) + ":" + request.url + "\n";
    if (request.body) material += std::to_string(request.body->size()) + ":" + *request.body;
    else material += "-";

    return sha256_hex(material);
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

std::string_view to_string(GatewayMode mode) {
    switch (mode) {
        case GatewayMode::Record: return "record";
        case GatewayMode::Replay: return "replay";
        case GatewayMode::Passthrough: return "passthrough";
    }
    return "replay";
}

GatewayMode parse_gateway_mode(std::string_view text) {
    if (text == "record") return GatewayMode::Record;
    if (text == "replay") return GatewayMode::Replay;
    if (text == "passthrough") return GatewayMode::Passthrough;
    fail(ErrorKind::Config, "gateway mode must be record, replay or passthrough, got '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// FixtureStore

FixtureStore::FixtureStore(fs::path directory) : directory_(std::move(directory)) {}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::Io, "cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) fail(ErrorKind::Io, "short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

CacheEntry parse_entry(const std::string& key, const std::string& meta_text, std::string body) {
    CacheEntry entry;
    entry.key = key;
    try {
        const auto meta = nlohmann::json::parse(meta_text);
        entry.method = meta.at("method").get<std::string>();
        entry.url = meta.at("url").get<std::string>();
        entry.content_type = meta.at("content_type").get<std::string>();
        entry.recorded_at = meta.at("recorded_at").get<std::string>();
        entry.status = meta.value("status", 200);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, "fixture " + key + ".meta.json: " + e.what());
    }
    entry.response_bytes = std::move(body);
    return entry;
}

}  // namespace

std::map<std::string, CacheEntry> FixtureStore::load_all() const {
    std::map<std::string, CacheEntry> out;
    if (!fs::is_directory(directory_)) fail(ErrorKind::Io, "fixture store not found: " + directory_.string());
    const std::string suffix = ".meta.json";
    for (const auto& item : fs::directory_iterator(directory_)) {
        const std::string name = item.path().filename().string();
        if (name.size() <= suffix.size() || name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
            continue;
        const std::string key = name.substr(0, name.size() - suffix.size());
        const fs::path body_path = directory_ / (key + ".body");
        if (!fs::exists(body_path)) fail(ErrorKind::Parse, "fixture " + key + " has no body file");
        out.emplace(key, parse_entry(key, read_file(item.path()), read_file(body_path)));
    }
    return out;
}

std::optional<CacheEntry> FixtureStore::read(const std::string& key) const {
    const fs::path meta_path = directory_ / (key + ".meta.json");
    const fs::path body_path = directory_ / (key + ".body");
    if (!fs::exists(meta_path) || !fs::exists(body_path)) return std::nullopt;
    return parse_entry(key, read_file(meta_path), read_file(body_path));
}

void FixtureStore::write(const CacheEntry& entry) {
    std::lock_guard lock(write_mutex_);
    fs::create_directories(directory_);
    nlohmann::ordered_json meta;
    meta["method"] = entry.method;
    meta["url"] = entry.url;
    meta["content_type"] = entry.content_type;
    meta["recorded_at"] = entry.recorded_at;
    meta["status"] = entry.status;
    write_file(directory_ / (entry.key + ".body"), entry.response_bytes);
    write_file(directory_ / (entry.key + ".meta.json"), meta.dump(2) + "\n");
}

bool FixtureStore::remove(const std::string& key) {
    std::lock_guard lock(write_mutex_);
    const bool had_meta = fs::remove(directory_ / (key + ".meta.json"));
    const bool had_body = fs::remove(directory_ / (key + ".body"));
    return had_meta || had_body;
}

// ---------------------------------------------------------------------------
// Transports

ReplayTransport::ReplayTransport(std::map<std::string, CacheEntry> entries) : entries_(std::move(entries)) {}

std::unique_ptr<ReplayTransport> ReplayTransport::from_store(const FixtureStore& store) {
    return std::make_unique<ReplayTransport>(store.load_all());
}

HttpResponse ReplayTransport::lookup(const ServiceRequest& request) const {
    validate(request);
    const std::string key = request_key(request);
    auto it = entries_.find(key);
    if (it == entries_.end())
        fail(ErrorKind::ReplayMiss, "replay miss: key=" + key + " " + std::string(to_string(request.method)) +
                                        " " + request.url);
    return {it->second.status, it->second.content_type, it->second.response_bytes};
}

RecordingTransport::RecordingTransport(Transport& network, FixtureStore& store, Clock clock)
    : network_(network), store_(store), clock_(clock ? std::move(clock) : Clock(utc_timestamp)) {}

HttpResponse RecordingTransport::send(const ServiceRequest& request) {
    validate(request);
    HttpResponse response = network_.send(request);
    store_.write({request_key(request), std::string(to_string(request.method)), request.url, response.status,
                  response.content_type, clock_(), response.body});
    return response;
}

VerifyingTransport::VerifyingTransport(const ReplayTransport& replay) : replay_(replay) {}

HttpResponse VerifyingTransport::send(const ServiceRequest& request) {
    try {
        return replay_.lookup(request);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::ReplayMiss) throw;
        std::lock_guard lock(mutex_);
        misses_.emplace_back(request_key(request), request.url);
        fail(ErrorKind::Transport, e.what());
    }
}

std::vector<std::pair<std::string, std::string>> VerifyingTransport::misses() const {
    std::lock_guard lock(mutex_);
    return misses_;
}

HttpResponse FailOnUseTransport::send(const ServiceRequest& request) {
    ++calls_;
    fail(ErrorKind::Transport, "network access is disabled: " + request.url);
}

}  // namespace ws4a
