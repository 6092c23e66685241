#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "ws4a/error.hpp"
#include "ws4a/hash.hpp"
#include "ws4a/transport.hpp"

using namespace ws4a;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

/// Echoes the request and counts calls.
class EchoTransport : public Transport {
public:
    HttpResponse send(const ServiceRequest& request) override {
        ++calls;
        return {200, "text/plain", std::string(to_string(request.method)) + " " + request.url + " " +
                                       request.body.value_or("")};
    }
    int calls = 0;
};

ServiceRequest get(const std::string& url, Service service = Service::Pubchem) {
    return {HttpMethod::Get, url, std::nullopt, service, {}};
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("sha256 known answers") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("request keys cover method, url and body but not headers") {
    auto a = get("http://x/a");
    auto b = a;
    b.headers.push_back({"api_key", "secret"});
    b.service = Service::Uniprot;
    CHECK(request_key(a) == request_key(b));
    CHECK(request_key(a).size() == 64);
    CHECK(request_key(a) != request_key(get("http://x/b")));

    ServiceRequest post{HttpMethod::Post, "http://x/a", std::string(""), Service::Whatizit, {}};
    CHECK(request_key(post) != request_key(a));
    ServiceRequest shifted = post;
    shifted.url = "http://x/a1";
    post.body = "1";
    CHECK(request_key(post) != request_key(shifted));
}

TEST_CASE("request validation") {
    CHECK(kind_of([] { validate(get("/relative")); }) == ErrorKind::InvalidArgument);
    ServiceRequest bad{HttpMethod::Get, "http://x/", std::string("body"), Service::Pubchem, {}};
    CHECK(kind_of([&] { validate(bad); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("gateway modes") {
    CHECK(parse_gateway_mode("record") == GatewayMode::Record);
    CHECK(to_string(parse_gateway_mode("passthrough")) == "passthrough");
    CHECK(kind_of([] { parse_gateway_mode("live"); }) == ErrorKind::Config);
    const auto stamp = utc_timestamp();
    CHECK(stamp.size() == 20);
    CHECK(stamp.back() == 'Z');
}

TEST_CASE("fixture store round trip") {
    TempDir dir("ws4a_store_roundtrip");
    FixtureStore store(dir.path / "s");
    CacheEntry entry{"k1", "GET", "http://x/a", 404, "application/json", "2016-05-01T00:00:00Z",
                     std::string("b\0ody\xCE\xB2", 7)};
    store.write(entry);
    CHECK(fs::exists(dir.path / "s" / "k1.meta.json"));
    CHECK(fs::exists(dir.path / "s" / "k1.body"));
    const auto back = store.read("k1");
    REQUIRE(back);
    CHECK(back->response_bytes == entry.response_bytes);
    CHECK(back->status == 404);
    CHECK(back->recorded_at == entry.recorded_at);
    CHECK_FALSE(store.read("missing"));
    CHECK(store.load_all().size() == 1);
    CHECK(store.remove("k1"));
    CHECK_FALSE(store.remove("k1"));
    CHECK(store.load_all().empty());
}

TEST_CASE("damaged stores are parse errors") {
    TempDir dir("ws4a_store_damaged");
    std::ofstream(dir.path / "k.meta.json") << "{\"method\":\"GET\"}";
    std::ofstream(dir.path / "k.body") << "x";
    CHECK(kind_of([&] { FixtureStore(dir.path).load_all(); }) == ErrorKind::Parse);
    std::ofstream(dir.path / "k.meta.json") << "{";
    CHECK(kind_of([&] { FixtureStore(dir.path).read("k"); }) == ErrorKind::Parse);
    fs::remove(dir.path / "k.body");
    CHECK(kind_of([&] { FixtureStore(dir.path).load_all(); }) == ErrorKind::Parse);
    CHECK(kind_of([&] { FixtureStore(dir.path / "nope").load_all(); }) == ErrorKind::Io);
}

TEST_CASE("record then replay answers identically without the network") {
    TempDir dir("ws4a_record_replay");
    FixtureStore store(dir.path);
    EchoTransport network;
    RecordingTransport recorder(network, store, [] { return std::string("2016-05-01T00:00:00Z"); });
    const std::vector<ServiceRequest> requests{
        get("http://x/a"), get("http://x/b?q=1"),
        {HttpMethod::Post, "http://x/w", std::string("text \xCE\xB2"), Service::Whatizit, {}}};
    std::vector<HttpResponse> live;
    for (const auto& r : requests) live.push_back(recorder.send(r));
    CHECK(network.calls == 3);
    CHECK(store.load_all().size() == 3);
    CHECK(store.read(request_key(requests[0]))->recorded_at == "2016-05-01T00:00:00Z");

    const auto replay = ReplayTransport::from_store(store);
    CHECK(replay->size() == 3);
    for (std::size_t i = 0; i < requests.size(); ++i) {
        const auto again = replay->lookup(requests[i]);
        CHECK(again.body == live[i].body);
        CHECK(again.content_type == live[i].content_type);
    }
    try {
        replay->lookup(get("http://x/c"));
        FAIL("miss not raised");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ReplayMiss);
        CHECK(std::string(e.what()).find(request_key(get("http://x/c"))) != std::string::npos);
        CHECK(std::string(e.what()).find("http://x/c") != std::string::npos);
    }

    // One entry per request: re-recording overwrites.
    recorder.send(requests[0]);
    CHECK(store.load_all().size() == 3);
}

TEST_CASE("verifying transport collects misses and degrades them") {
    ReplayTransport replay({});
    VerifyingTransport verifier(replay);
    CHECK(kind_of([&] { verifier.send(get("http://x/a")); }) == ErrorKind::Transport);
    CHECK(kind_of([&] { verifier.send(get("http://x/b")); }) == ErrorKind::Transport);
    const auto misses = verifier.misses();
    REQUIRE(misses.size() == 2);
    CHECK(misses[0].second == "http://x/a");
    CHECK(misses[1].first == request_key(get("http://x/b")));
}

TEST_CASE("fail-on-use counts attempts") {
    FailOnUseTransport guard;
    CHECK(guard.calls() == 0);
    CHECK(kind_of([&] { guard.send(get("http://x/a")); }) == ErrorKind::Transport);
    CHECK(guard.calls() == 1);
}

TEST_CASE("http transport against a local server") {
    httplib::Server server;
    std::atomic<int> flaky_calls{0};
    server.Get("/ok", [](const httplib::Request& req, httplib::Response& res) {
        res.set_content("hello " + req.get_header_value("X-Key"), "text/plain");
    });
    server.Get("/flaky", [&](const httplib::Request&, httplib::Response& res) {
        if (++flaky_calls < 3) {
            res.status = 503;
            return;
        }
        res.set_content("finally", "text/plain");
    });
    server.Get("/down", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    server.Get("/missing", [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
    server.Post("/echo", [](const httplib::Request& req, httplib::Response& res) {
        res.set_content(req.body, "text/plain");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    const std::string base = "http://127.0.0.1:" + std::to_string(port);

    HttpOptions options;
    options.min_delay = std::chrono::milliseconds(40);
    options.retries = 3;
    options.timeout = std::chrono::seconds(5);
    options.headers = {{"X-Key", "k"}};
    HttpTransport http(options);

    CHECK(http.send(get(base + "/ok")).body == "hello k");
    CHECK(http.send(get(base + "/flaky")).body == "finally");
    CHECK(flaky_calls == 3);
    CHECK(kind_of([&] { http.send(get(base + "/down")); }) == ErrorKind::Transport);
    CHECK(http.send(get(base + "/missing")).status == 404);
    ServiceRequest post{HttpMethod::Post, base + "/echo", std::string("a b"), Service::Whatizit, {}};
    CHECK(http.send(post).body == "a b");

    // Five requests to one service take at least four delays.
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < 5; ++i) http.send(get(base + "/ok", Service::Sparql));
    CHECK(std::chrono::steady_clock::now() - start >= std::chrono::milliseconds(160));

    server.stop();
    worker.join();
    HttpOptions quick;
    quick.retries = 1;
    quick.min_delay = std::chrono::milliseconds(0);
    quick.timeout = std::chrono::seconds(1);
    CHECK(kind_of([&] { HttpTransport(quick).send(get(base + "/ok")); }) == ErrorKind::Transport);
}
