#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <map>

#include "ws4a/config.hpp"
#include "ws4a/error.hpp"

using namespace ws4a;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::InvalidArgument;
}

EnvLookup no_env() {
    return [](std::string_view) { return std::optional<std::string>(); };
}

EnvLookup env_of(std::map<std::string, std::string> values) {
    return [values = std::move(values)](std::string_view name) -> std::optional<std::string> {
        auto it = values.find(std::string(name));
        if (it == values.end()) return std::nullopt;
        return it->second;
    };
}

}  // namespace

TEST_CASE("defaults") {
    const auto config = default_config("/base", no_env());
    CHECK(config.mode == GatewayMode::Replay);
    CHECK(config.store == std::filesystem::path("/base/store"));
    CHECK(config.cutoff == kDefaultCutoff);
    CHECK(config.caps.documents == 10);
    CHECK(config.caps.triples == 10);
    CHECK(config.evaluator.threshold == 0.5);
    CHECK(config.classifier.n_max == 2);
    CHECK(config.ontologies.empty());
    CHECK_FALSE(config.retriever.mindate);
}

TEST_CASE("a full file") {
    const auto config = parse_config(R"(
# comment
[gateway]
mode = "record"   # trailing comment
store = "cache/store"
parallelism = 4
min_delay_ms = 0
headers = ["api-key: abc#1", "X-Other: 2"]

[endpoints]
eutils = "https://example.org/eutils/"

[annotator]
ontologies = [MESH, GO]
longest_only = false

[ontology]
files = ["mesh.obo", "/abs/terms.tsv@GO"]

[corpus]
cutoff = "2014-06-30"

[retriever]
mindate = "2012"
recency_cap = 3

[evaluator]
weights = [0.4, 0.2, 0.2, 0.2]
threshold = 0.35

[classifier]
c = 100
epochs = 7
seed = 9
holdout_fraction = 0

[caps]
snippets = 5
)",
                                     "/etc/ws4a", no_env());
    CHECK(config.mode == GatewayMode::Record);
    CHECK(config.store == std::filesystem::path("/etc/ws4a/cache/store"));
    CHECK(config.gateway.parallelism == 4);
    CHECK(config.http.min_delay.count() == 0);
    REQUIRE(config.http.headers.size() == 2);
    CHECK(config.http.headers[0] == std::pair<std::string, std::string>{"api-key", "abc#1"});
    CHECK(config.gateway.endpoints.eutils == "https://example.org/eutils");
    CHECK(config.annotation.params.ontologies == std::vector<ConceptSource>{ConceptSource::Mesh, ConceptSource::Go});
    CHECK_FALSE(config.annotation.params.longest_only);
    REQUIRE(config.ontologies.size() == 2);
    CHECK(config.ontologies[0].path == std::filesystem::path("/etc/ws4a/mesh.obo"));
    CHECK(config.ontologies[1].path == std::filesystem::path("/abs/terms.tsv"));
    CHECK(config.ontologies[1].default_source == ConceptSource::Go);
    CHECK(config.cutoff == Date{2014, 6, 30});
    CHECK(config.gateway.cutoff == config.cutoff);
    CHECK(config.retriever.cutoff == config.cutoff);
    CHECK(config.retriever.mindate->year == 2012);
    CHECK(config.retriever.recency_cap == 3);
    CHECK(config.evaluator.weights[0] == 0.4);
    CHECK(config.evaluator.threshold == 0.35);
    CHECK(config.classifier.svm.C == 100);
    CHECK(config.classifier.svm.epochs == 7);
    CHECK(config.classifier.svm.seed == 9);
    CHECK(config.classifier.holdout_fraction == 0);
    CHECK(config.caps.snippets == 5);
    CHECK(config.caps.documents == 10);
}

TEST_CASE("environment overrides the file") {
    const auto env = env_of({{"WS4A_CAPS_DOCUMENTS", "3"}, {"WS4A_GATEWAY_MODE", "passthrough"}});
    const auto config = parse_config("[caps]\ndocuments = 7\n", "/b", env);
    CHECK(config.caps.documents == 3);
    CHECK(config.mode == GatewayMode::Passthrough);
    CHECK(default_config("/b", env).caps.documents == 3);
    CHECK(kind_of([] { default_config("/b", env_of({{"WS4A_CAPS_TRIPLES", "0"}})); }) == ErrorKind::Config);
}

TEST_CASE("every key has a section and an environment name") {
    const auto& keys = config_keys();
    CHECK(keys.size() > 40);
    CHECK(keys.front() == "gateway.mode");
    for (const auto& key : keys) CHECK(key.find('.') != std::string::npos);
}

TEST_CASE("bad files are Config errors") {
    for (const char* text : {"[caps\n", "[caps]\nnonsense\n", "[caps]\nbogus = 1\n", "top = 1\n",
                             "[caps]\ndocuments = 1\ndocuments = 2\n", "[caps]\ndocuments = 0\n",
                             "[caps]\ndocuments = ten\n", "[gateway]\nmode = live\n",
                             "[gateway]\nheaders = [\"no colon\"]\n", "[endpoints]\neutils = \"not a url\"\n",
                             "[annotator]\nontologies = [CHEBI]\n", "[annotator]\nlongest_only = maybe\n",
                             "[evaluator]\nweights = [0.5, 0.5, 0.5, 0.5]\n", "[evaluator]\nweights = [1]\n",
                             "[evaluator]\nthreshold = 1.5\n", "[classifier]\nc = -1\n",
                             "[classifier]\nholdout_fraction = 1\n", "[corpus]\ncutoff = \"2015-13-01\"\n",
                             "[retriever]\nmindate = \"2016\"\n", "[ontology]\nfiles = [\"x.obo@NOPE\"]\n",
                             "[gateway]\nmin_delay_ms = -5\n"})
        CHECK_MESSAGE(kind_of([&] { parse_config(text, "/b", no_env()); }) == ErrorKind::Config, text);
}

TEST_CASE("loading from disk") {
    const auto dir = std::filesystem::temp_directory_path() / "ws4a_test_config";
    std::filesystem::create_directories(dir);
    const auto path = dir / "ws4a.conf";
    std::ofstream(path) << "[gateway]\nstore = \"s\"\n";
    CHECK(load_config(path, no_env()).store == dir / "s");
    CHECK(kind_of([&] { load_config(dir / "missing.conf", no_env()); }) == ErrorKind::Config);
    std::filesystem::remove_all(dir);
}
