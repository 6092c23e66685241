#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ws4a/domain.hpp"

namespace ws4a {

struct ConceptNode {
    std::string id;
    std::string label;
    ConceptSource source = ConceptSource::Mesh;
    std::string uri;
};

using IsAEdge = std::pair<std::string, std::string>;  // (child, parent)

/// An is-a DAG over concepts of one or more sources. Immutable once built;
/// `build` rejects dangling edges and cycles.
class OntologyGraph {
public:
    OntologyGraph() = default;

    static OntologyGraph build(std::vector<ConceptNode> nodes, std::vector<IsAEdge> edges);
    /// Union of several graphs; later duplicates of a node id are ignored.
    static OntologyGraph merge(std::span<const OntologyGraph> graphs);

    bool contains(std::string_view id) const;
    /// Throws UnknownConcept.
    const ConceptNode& node(std::string_view id) const;
    const std::vector<std::string>& parents(std::string_view id) const;
    const std::vector<std::string>& children(std::string_view id) const;

    std::size_t size() const { return nodes_.size(); }
    const std::map<std::string, ConceptNode, std::less<>>& nodes() const { return nodes_; }
    std::vector<IsAEdge> edges() const;
    std::vector<std::string> roots() const;

private:
    std::map<std::string, ConceptNode, std::less<>> nodes_;
    std::map<std::string, std::vector<std::string>, std::less<>> parents_;
    std::map<std::string, std::vector<std::string>, std::less<>> children_;
};

enum class OntologyFormat { OboSubset, TsvEdges };

/// obo-subset: `[Term]` stanzas with `id:`, `name:`, `is_a:` lines; anything
/// else is ignored. The id prefix picks the source (CHEBI:, GO:, DOID:,
/// MESH:, JOCHEM:); unprefixed ids take `default_source`. MESH: is stripped
/// so MeSH ids match the annotator's descriptor UIs.
///
/// tsv-edges: `child<TAB>parent` per line, `#` comments, every node gets
/// `default_source` and its id as label.
OntologyGraph parse_ontology(std::string_view text, OntologyFormat format,
                             ConceptSource default_source = ConceptSource::Mesh,
                             std::string_view origin = "<memory>");
OntologyGraph load_ontology(const std::filesystem::path& path, OntologyFormat format,
                            ConceptSource default_source = ConceptSource::Mesh);
/// Format chosen by extension: .obo or .tsv.
OntologyFormat format_for_path(const std::filesystem::path& path);

struct AncestorSet {
    std::string concept_id;
    std::set<std::string> ancestors;
};

/// Transitive parents of `id`, excluding `id` itself.
AncestorSet ancestors(const OntologyGraph& graph, std::string_view id);

/// Shortest upward distance from `id` to each ancestor-or-self.
std::map<std::string, std::size_t> upward_distances(const OntologyGraph& graph, std::string_view id);

/// Length of the shortest path a -> common ancestor -> b, or nullopt when the
/// two concepts share no ancestor (self included).
std::optional<std::size_t> hierarchical_distance(const OntologyGraph& graph, std::string_view a,
                                                 std::string_view b);

/// 1 / (1 + d) with d from hierarchical_distance; 0 without a common ancestor.
/// Throws UnknownConcept or SourceMismatch.
double hierarchical_similarity(const OntologyGraph& graph, std::string_view a, std::string_view b);

bool is_mesh(const ConceptAnnotation& annotation);
std::vector<ConceptAnnotation> mesh_only(std::span<const ConceptAnnotation> annotations);

}  // namespace ws4a
