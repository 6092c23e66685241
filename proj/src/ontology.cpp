#include "ws4a/ontology.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include "ws4a/error.hpp"
#include "ws4a/text.hpp"

namespace ws4a {

namespace {

const std::vector<std::string>& empty_list() {
    static const std::vector<std::string> kEmpty;
    return kEmpty;
}

// Three-colour DFS; returns a concept on a cycle if there is one.
std::optional<std::string> find_cycle(
    const std::map<std::string, ConceptNode, std::less<>>& nodes,
    const std::map<std::string, std::vector<std::string>, std::less<>>& parents) {
    enum class Colour { White, Grey, Black };
    std::map<std::string_view, Colour> colour;
    for (const auto& [id, node] : nodes) colour[id] = Colour::White;

    for (const auto& [start, node] : nodes) {
        if (colour[start] != Colour::White) continue;
        // (node, next parent index)
        std::vector<std::pair<std::string_view, std::size_t>> stack{{start, 0}};
        colour[start] = Colour::Grey;
        while (!stack.empty()) {
            auto& [current, next] = stack.back();
            auto it = parents.find(current);
            if (it == parents.end() || next >= it->second.size()) {
                colour[current] = Colour::Black;
                stack.pop_back();
                continue;
            }
            const std::string& parent = it->second[next++];
            if (colour[parent] == Colour::Grey) return parent;
            if (colour[parent] == Colour::White) {
                colour[parent] = Colour::Grey;
                stack.emplace_back(parent, 0);
            }
        }
    }
    return std::nullopt;
}

struct OboId {
    std::string id;
    ConceptSource source;
};

OboId classify_obo_id(std::string_view raw, ConceptSource default_source) {
    const auto colon = raw.find(':');
    if (colon == std::string_view::npos) return {std::string(raw), default_source};
    const auto prefix = raw.substr(0, colon);
    if (prefix == "MESH") return {std::string(raw.substr(colon + 1)), ConceptSource::Mesh};
    if (prefix == "CHEBI") return {std::string(raw), ConceptSource::Chebi};
    if (prefix == "GO") return {std::string(raw), ConceptSource::Go};
    if (prefix == "DOID") return {std::string(raw), ConceptSource::Do};
    if (prefix == "JOCHEM") return {std::string(raw), ConceptSource::Jochem};
    return {std::string(raw), default_source};
}

OntologyGraph parse_obo(std::string_view text, ConceptSource default_source, std::string_view origin) {
    std::vector<ConceptNode> nodes;
    std::vector<IsAEdge> edges;
    std::map<std::string, ConceptSource> referenced;

    bool in_term = false;
    std::optional<ConceptNode> current;
    std::vector<std::string> current_parents;
    const auto flush = [&](std::size_t line_no) {
        if (!in_term) return;
        if (!current)
            fail(ErrorKind::Parse, std::string(origin) + ":" + std::to_string(line_no) +
                                       ": [Term] stanza without an id");
        for (auto& parent : current_parents) edges.emplace_back(current->id, std::move(parent));
        current_parents.clear();
        nodes.push_back(std::move(*current));
        current.reset();
    };

    std::istringstream in{std::string(text)};
    std::string raw_line;
    std::size_t line_no = 0;
    while (std::getline(in, raw_line)) {
        ++line_no;
        const auto line = trim(raw_line);
        if (line.empty() || line.front() == '!') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail(ErrorKind::Parse, std::string(origin) + ":" + std::to_string(line_no) +
                                           ": malformed stanza header");
            flush(line_no);
            in_term = line == "[Term]";
            continue;
        }
        if (!in_term) continue;
        const auto colon = line.find(':');
        if (colon == std::string_view::npos)
            fail(ErrorKind::Parse, std::string(origin) + ":" + std::to_string(line_no) +
                                       ": expected 'tag: value'");
        const auto tag = trim(line.substr(0, colon));
        auto value = trim(line.substr(colon + 1));
        if (tag == "is_a") {
            // Trailing "! label" comment.
            if (auto bang = value.find('!'); bang != std::string_view::npos) value = trim(value.substr(0, bang));
            if (value.empty() || value.find_first_of(" \t") != std::string_view::npos)
                fail(ErrorKind::Parse, std::string(origin) + ":" + std::to_string(line_no) +
                                           ": malformed is_a value");
            auto parent = classify_obo_id(value, default_source);
            referenced.emplace(parent.id, parent.source);
            current_parents.push_back(std::move(parent.id));
        } else if (tag == "id") {
            if (value.empty() || current)
                fail(ErrorKind::Parse, std::string(origin) + ":" + std::to_string(line_no) +
                                           ": missing or repeated id");
            auto id = classify_obo_id(value, default_source);
            current = ConceptNode{id.id, id.id, id.source, concept_uri(id.source, id.id)};
        } else if (tag == "name") {
            if (!current)
                fail(ErrorKind::Parse, std::string(origin) + ":" + std::to_string(line_no) +
                                           ": name before id");
            current->label = std::string(value);
        }
    }
    flush(line_no);

    // Parents outside the subset become label-less placeholder nodes.
    std::set<std::string> defined;
    for (const auto& node : nodes) defined.insert(node.id);
    for (const auto& [id, source] : referenced)
        if (!defined.count(id)) nodes.push_back({id, id, source, concept_uri(source, id)});
    return OntologyGraph::build(std::move(nodes), std::move(edges));
}

OntologyGraph parse_tsv(std::string_view text, ConceptSource default_source, std::string_view origin) {
    std::set<std::string> ids;
    std::vector<IsAEdge> edges;
    std::istringstream in{std::string(text)};
    std::string raw_line;
    std::size_t line_no = 0;
    while (std::getline(in, raw_line)) {
        ++line_no;
        if (!raw_line.empty() && raw_line.back() == '\r') raw_line.pop_back();
        if (trim(raw_line).empty() || trim(raw_line).front() == '#') continue;
        const auto tab = raw_line.find('\t');
        if (tab == std::string::npos || raw_line.find('\t', tab + 1) != std::string::npos)
            fail(ErrorKind::Parse, std::string(origin) + ":" + std::to_string(line_no) +
                                       ": expected 'child<TAB>parent'");
        std::string child(trim(std::string_view(raw_line).substr(0, tab)));
        std::string parent(trim(std::string_view(raw_line).substr(tab + 1)));
        if (child.empty() || parent.empty())
            fail(ErrorKind::Parse, std::string(origin) + ":" + std::to_string(line_no) + ": empty concept id");
        ids.insert(child);
        ids.insert(parent);
        edges.emplace_back(std::move(child), std::move(parent));
    }
    std::vector<ConceptNode> nodes;
    for (const auto& id : ids) nodes.push_back({id, id, default_source, concept_uri(default_source, id)});
    return OntologyGraph::build(std::move(nodes), std::move(edges));
}

}  // namespace

OntologyGraph OntologyGraph::build(std::vector<ConceptNode> nodes, std::vector<IsAEdge> edges) {
    OntologyGraph graph;
    for (auto& node : nodes) {
        if (node.id.empty()) fail(ErrorKind::InvalidArgument, "ontology node with empty id");
        const std::string id = node.id;
        graph.nodes_.emplace(id, std::move(node));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (auto& [child, parent] : edges) {
        if (!graph.contains(child) || !graph.contains(parent))
            fail(ErrorKind::InvalidArgument, "is-a edge " + child + " -> " + parent + " names an unknown concept");
        if (child == parent) fail(ErrorKind::Cycle, "cycle through concept " + child);
        graph.parents_[child].push_back(parent);
        graph.children_[parent].push_back(child);
    }
    if (auto on_cycle = find_cycle(graph.nodes_, graph.parents_))
        fail(ErrorKind::Cycle, "cycle through concept " + *on_cycle);
    return graph;
}

OntologyGraph OntologyGraph::merge(std::span<const OntologyGraph> graphs) {
    std::vector<ConceptNode> nodes;
    std::set<std::string> seen;
    std::vector<IsAEdge> edges;
    for (const auto& graph : graphs) {
        for (const auto& [id, node] : graph.nodes_)
            if (seen.insert(id).second) nodes.push_back(node);
        for (auto& edge : graph.edges()) edges.push_back(std::move(edge));
    }
    return build(std::move(nodes), std::move(edges));
}

bool OntologyGraph::contains(std::string_view id) const { return nodes_.find(id) != nodes_.end(); }

const ConceptNode& OntologyGraph::node(std::string_view id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) fail(ErrorKind::UnknownConcept, "unknown concept " + std::string(id));
    return it->second;
}

const std::vector<std::string>& OntologyGraph::parents(std::string_view id) const {
    auto it = parents_.find(id);
    return it == parents_.end() ? empty_list() : it->second;
}

const std::vector<std::string>& OntologyGraph::children(std::string_view id) const {
    auto it = children_.find(id);
    return it == children_.end() ? empty_list() : it->second;
}

std::vector<IsAEdge> OntologyGraph::edges() const {
    std::vector<IsAEdge> out;
    for (const auto& [child, parents] : parents_)
        for (const auto& parent : parents) out.emplace_back(child, parent);
    return out;
}

std::vector<std::string> OntologyGraph::roots() const {
    std::vector<std::string> out;
    for (const auto& [id, node] : nodes_)
        if (parents(id).empty()) out.push_back(id);
    return out;
}

OntologyGraph parse_ontology(std::string_view text, OntologyFormat format, ConceptSource default_source,
                             std::string_view origin) {
    return format == OntologyFormat::OboSubset ? parse_obo(text, default_source, origin)
                                               : parse_tsv(text, default_source, origin);
}

OntologyGraph load_ontology(const std::filesystem::path& path, OntologyFormat format,
                            ConceptSource default_source) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open ontology file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_ontology(buffer.str(), format, default_source, path.string());
}

OntologyFormat format_for_path(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".obo") return OntologyFormat::OboSubset;
    if (ext == ".tsv") return OntologyFormat::TsvEdges;
    fail(ErrorKind::Config, "cannot infer ontology format from " + path.string());
}

AncestorSet ancestors(const OntologyGraph& graph, std::string_view id) {
    graph.node(id);
    AncestorSet out{std::string(id), {}};
    std::vector<std::string_view> stack{id};
    while (!stack.empty()) {
        const auto current = stack.back();
        stack.pop_back();
        for (const auto& parent : graph.parents(current))
            if (out.ancestors.insert(parent).second) stack.push_back(parent);
    }
    return out;
}

std::map<std::string, std::size_t> upward_distances(const OntologyGraph& graph, std::string_view id) {
    graph.node(id);
    std::map<std::string, std::size_t> dist{{std::string(id), 0}};
    std::deque<std::string> queue{std::string(id)};
    while (!queue.empty()) {
        const std::string current = std::move(queue.front());
        queue.pop_front();
        const std::size_t next = dist[current] + 1;
        for (const auto& parent : graph.parents(current)) {
            if (dist.emplace(parent, next).second) queue.push_back(parent);
        }
    }
    return dist;
}

std::optional<std::size_t> hierarchical_distance(const OntologyGraph& graph, std::string_view a,
                                                 std::string_view b) {
    const auto from_a = upward_distances(graph, a);
    const auto from_b = upward_distances(graph, b);
    std::optional<std::size_t> best;
    for (const auto& [ancestor, da] : from_a) {
        auto it = from_b.find(ancestor);
        if (it == from_b.end()) continue;
        const std::size_t d = da + it->second;
        if (!best || d < *best) best = d;
    }
    return best;
}

double hierarchical_similarity(const OntologyGraph& graph, std::string_view a, std::string_view b) {
    const auto& node_a = graph.node(a);
    const auto& node_b = graph.node(b);
    if (node_a.source != node_b.source)
        fail(ErrorKind::SourceMismatch, "concepts " + std::string(a) + " and " + std::string(b) +
                                            " come from different sources");
    const auto d = hierarchical_distance(graph, a, b);
    return d ? 1.0 / (1.0 + static_cast<double>(*d)) : 0.0;
}

bool is_mesh(const ConceptAnnotation& annotation) { return annotation.source == ConceptSource::Mesh; }

std::vector<ConceptAnnotation> mesh_only(std::span<const ConceptAnnotation> annotations) {
    std::vector<ConceptAnnotation> out;
    std::copy_if(annotations.begin(), annotations.end(), std::back_inserter(out), is_mesh);
    return out;
}

}  // namespace ws4a
