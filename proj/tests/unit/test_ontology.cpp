#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "instances.hpp"
#include "oracles.hpp"
#include "ws4a/error.hpp"
#include "ws4a/ontology.hpp"

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

ConceptNode mesh_node(const std::string& id) { return {id, id, ConceptSource::Mesh, id}; }

}  // namespace

TEST_CASE("ancestors and distances match Floyd-Warshall on random DAGs") {
    std::mt19937_64 rng(2016);
    std::uniform_int_distribution<int> size(1, 30);
    std::uniform_real_distribution<double> density(0.02, 0.3);
    for (int round = 0; round < 50; ++round) {
        const int n = size(rng);
        const auto dag = oracle::random_dag(rng, n, density(rng), "D");
        const auto graph = testing::graph_from_dag(dag);
        const auto up = oracle::upward_closure(n, dag.edges);
        REQUIRE(graph.size() == static_cast<std::size_t>(n));
        for (int a = 0; a < n; ++a) {
            std::set<std::string> expected;
            for (int c : oracle::ancestors(up, a)) expected.insert(dag.ids[c]);
            CHECK(ancestors(graph, dag.ids[a]).ancestors == expected);
            const auto distances = upward_distances(graph, dag.ids[a]);
            for (int c = 0; c < n; ++c) {
                const auto it = distances.find(dag.ids[c]);
                if (up[a][c] >= oracle::kInf) CHECK(it == distances.end());
                else CHECK(it->second == static_cast<std::size_t>(up[a][c]));
            }
            for (int b = 0; b < n; ++b) {
                const auto d = oracle::distance(up, a, b);
                const auto got = hierarchical_distance(graph, dag.ids[a], dag.ids[b]);
                CHECK(got.has_value() == d.has_value());
                if (d && got) CHECK(*got == static_cast<std::size_t>(*d));
                CHECK(hierarchical_similarity(graph, dag.ids[a], dag.ids[b]) ==
                      doctest::Approx(oracle::similarity(up, a, b)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("similarity basics") {
    const auto graph = OntologyGraph::build({mesh_node("root"), mesh_node("a"), mesh_node("b"), mesh_node("c")},
                                            {{"a", "root"}, {"b", "root"}, {"c", "a"}});
    CHECK(hierarchical_similarity(graph, "a", "a") == 1.0);
    CHECK(hierarchical_similarity(graph, "a", "b") == doctest::Approx(1.0 / 3.0));
    CHECK(hierarchical_similarity(graph, "c", "root") == doctest::Approx(1.0 / 3.0));
    CHECK(hierarchical_similarity(graph, "c", "b") == doctest::Approx(0.25));
    CHECK(graph.roots() == std::vector<std::string>{"root"});
    CHECK(graph.children("root").size() == 2);
    CHECK(kind_of([&] { hierarchical_similarity(graph, "a", "zzz"); }) == ErrorKind::UnknownConcept);
}

TEST_CASE("disconnected concepts have no distance") {
    const auto graph = OntologyGraph::build({mesh_node("x"), mesh_node("y")}, {});
    CHECK_FALSE(hierarchical_distance(graph, "x", "y"));
    CHECK(hierarchical_similarity(graph, "x", "y") == 0.0);
}

TEST_CASE("cross-source similarity is rejected") {
    const auto graph = OntologyGraph::build(
        {mesh_node("D1"), {"GO:1", "go", ConceptSource::Go, "u"}}, {});
    CHECK(kind_of([&] { hierarchical_similarity(graph, "D1", "GO:1"); }) == ErrorKind::SourceMismatch);
}

TEST_CASE("cycles are rejected") {
    CHECK(kind_of([] { OntologyGraph::build({mesh_node("a")}, {{"a", "a"}}); }) == ErrorKind::Cycle);
    CHECK(kind_of([] {
              OntologyGraph::build({mesh_node("a"), mesh_node("b"), mesh_node("c")},
                                   {{"a", "b"}, {"b", "c"}, {"c", "a"}});
          }) == ErrorKind::Cycle);
    CHECK(kind_of([] { parse_ontology("a\tb\nb\ta\n", OntologyFormat::TsvEdges); }) == ErrorKind::Cycle);
    CHECK(kind_of([] { OntologyGraph::build({mesh_node("a")}, {{"a", "ghost"}}); }) ==
          ErrorKind::InvalidArgument);

    // Random graphs with one back edge added: rejected exactly when the oracle sees a cycle.
    std::mt19937_64 rng(5);
    for (int round = 0; round < 50; ++round) {
        auto dag = oracle::random_dag(rng, 8, 0.3, "N");
        std::uniform_int_distribution<int> node(0, 7);
        const int a = node(rng), b = node(rng);
        dag.edges.push_back({a, b});
        bool rejected = false;
        try {
            testing::graph_from_dag(dag);
        } catch (const Error& e) {
            rejected = e.kind() == ErrorKind::Cycle;
        }
        CHECK(rejected == oracle::has_cycle(8, dag.edges));
    }
}

TEST_CASE("obo subset parsing") {
    const char* obo = R"(format-version: 1.2

[Term]
id: CHEBI:15377
name: water
is_a: CHEBI:33579 ! main group molecular entity

[Typedef]
id: part_of

[Term]
id: MESH:D002318
name: Cardiovascular Diseases
)";
    const auto graph = parse_ontology(obo, OntologyFormat::OboSubset);
    CHECK(graph.node("CHEBI:15377").label == "water");
    CHECK(graph.node("CHEBI:15377").source == ConceptSource::Chebi);
    CHECK(graph.parents("CHEBI:15377") == std::vector<std::string>{"CHEBI:33579"});
    CHECK(graph.contains("CHEBI:33579"));  // placeholder parent
    CHECK(graph.node("D002318").source == ConceptSource::Mesh);
    CHECK_FALSE(graph.contains("part_of"));
    CHECK(graph.node("CHEBI:15377").uri == "http://purl.obolibrary.org/obo/CHEBI_15377");

    CHECK(kind_of([] { parse_ontology("[Term]\nname: x\n", OntologyFormat::OboSubset); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_ontology("[Term]\nid: a\nid: b\n", OntologyFormat::OboSubset); }) ==
          ErrorKind::Parse);
    CHECK(kind_of([] { parse_ontology("[Term\nid: a\n", OntologyFormat::OboSubset); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_ontology("[Term]\nid: a\nis_a: b c\n", OntologyFormat::OboSubset); }) ==
          ErrorKind::Parse);
}

TEST_CASE("tsv edges parsing") {
    const auto graph = parse_ontology("# comment\nGO:2\tGO:1\r\n\nGO:3\tGO:1\n", OntologyFormat::TsvEdges,
                                      ConceptSource::Go);
    CHECK(graph.size() == 3);
    CHECK(graph.node("GO:3").source == ConceptSource::Go);
    CHECK(hierarchical_similarity(graph, "GO:2", "GO:3") == doctest::Approx(1.0 / 3.0));
    CHECK(kind_of([] { parse_ontology("a b\n", OntologyFormat::TsvEdges); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_ontology("a\tb\tc\n", OntologyFormat::TsvEdges); }) == ErrorKind::Parse);
}

TEST_CASE("files, formats and merging") {
    CHECK(format_for_path("x/mesh.obo") == OntologyFormat::OboSubset);
    CHECK(format_for_path("edges.tsv") == OntologyFormat::TsvEdges);
    CHECK(kind_of([] { format_for_path("x.owl"); }) == ErrorKind::Config);
    CHECK(kind_of([] { load_ontology("/nonexistent.obo", OntologyFormat::OboSubset); }) == ErrorKind::Io);

    const auto dir = std::filesystem::temp_directory_path() / "ws4a_ontology_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "g.tsv") << "b\ta\n";
    const auto loaded = load_ontology(dir / "g.tsv", OntologyFormat::TsvEdges);
    std::filesystem::remove_all(dir);

    const std::vector<OntologyGraph> parts{
        loaded, OntologyGraph::build({mesh_node("a"), mesh_node("c")}, {{"c", "a"}})};
    const auto merged = OntologyGraph::merge(parts);
    CHECK(merged.size() == 3);
    CHECK(hierarchical_similarity(merged, "b", "c") == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("mesh filter") {
    std::vector<ConceptAnnotation> annotations(3);
    annotations[0].source = ConceptSource::Mesh;
    annotations[1].source = ConceptSource::Chebi;
    annotations[2].source = ConceptSource::Mesh;
    CHECK(mesh_only(annotations).size() == 2);
    CHECK(is_mesh(annotations[0]));
}
