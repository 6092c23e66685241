#include "ws4a/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ws4a/error.hpp"
#include "ws4a/text.hpp"

namespace ws4a {

namespace {

// First annotation of each distinct concept id, in set order.
std::vector<const ConceptAnnotation*> distinct_concepts(const AnnotationSet& set) {
    std::vector<const ConceptAnnotation*> out;
    std::set<std::string_view> seen;
    for (const auto& annotation : set.annotations)
        if (seen.insert(annotation.concept_id).second) out.push_back(&annotation);
    return out;
}

std::map<std::string, double> term_bag(std::string_view text, const ConceptDictionary& dictionary) {
    std::map<std::string, double> bag;
    for (auto& token : tokenize(text)) bag[std::move(token.surface)] += 1.0;
    // Concept features live in their own namespace so they never collide with words.
    for (const auto& annotation : dictionary.scan(text)) bag["concept:" + annotation.concept_id] += 1.0;
    return bag;
}

}  // namespace

double jaccard_score(const AnnotationSet& query, const AnnotationSet& abstract) {
    const auto q = query.concept_ids();
    const auto a = abstract.concept_ids();
    if (q.empty() && a.empty()) return 0.0;
    std::size_t common = 0;
    for (const auto& id : q) common += a.count(id);
    return static_cast<double>(common) / static_cast<double>(q.size() + a.size() - common);
}

double concept_similarity(const OntologyGraph& graph, const ConceptAnnotation& a, const ConceptAnnotation& b) {
    if (a.source != b.source) return 0.0;
    if (a.concept_id == b.concept_id) return 1.0;
    if (!graph.contains(a.concept_id) || !graph.contains(b.concept_id)) return 0.0;
    if (graph.node(a.concept_id).source != graph.node(b.concept_id).source) return 0.0;
    return hierarchical_similarity(graph, a.concept_id, b.concept_id);
}

double hierarchical_score(const AnnotationSet& query, const AnnotationSet& abstract, const OntologyGraph& graph) {
    const auto q = distinct_concepts(query);
    const auto a = distinct_concepts(abstract);
    if (q.empty() || a.empty()) return 0.0;
    double total = 0.0;
    for (const auto* qc : q) {
        double best = 0.0;
        for (const auto* ac : a) best = std::max(best, concept_similarity(graph, *qc, *ac));
        total += best;
    }
    return total / static_cast<double>(q.size());
}

std::vector<std::string> top_concepts(const AnnotationSet& annotations, std::size_t k) {
    std::map<std::string, double> best;
    for (const auto& annotation : annotations.annotations) {
        auto [it, inserted] = best.emplace(annotation.concept_id, annotation.score);
        if (!inserted) it->second = std::max(it->second, annotation.score);
    }
    std::vector<std::pair<std::string, double>> ranked(best.begin(), best.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& x, const auto& y) { return x.second > y.second; });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].first);
    return out;
}

double top_frequency_score(const AnnotationSet& query, const AnnotationSet& abstract, std::size_t k) {
    if (k < 1) fail(ErrorKind::InvalidArgument, "top_frequency_score: k must be >= 1");
    const auto q = top_concepts(query, k);
    const auto a = top_concepts(abstract, k);
    std::size_t common = 0;
    for (const auto& id : q) common += static_cast<std::size_t>(std::count(a.begin(), a.end(), id));
    return static_cast<double>(common) / static_cast<double>(k);
}

double sentence_similarity(std::string_view query_text, std::string_view abstract_text,
                           const ConceptDictionary& dictionary) {
    const auto q = term_bag(query_text, dictionary);
    const auto a = term_bag(abstract_text, dictionary);
    if (q.empty() || a.empty()) return 0.0;
    double dot = 0.0, qq = 0.0, aa = 0.0;
    for (const auto& [term, weight] : q) {
        qq += weight * weight;
        if (auto it = a.find(term); it != a.end()) dot += weight * it->second;
    }
    for (const auto& [term, weight] : a) aa += weight * weight;
    return std::clamp(dot / std::sqrt(qq * aa), 0.0, 1.0);
}

double sentence_similarity(std::string_view query_text, std::string_view abstract_text, const OntologyGraph& graph) {
    return sentence_similarity(query_text, abstract_text, ConceptDictionary(graph));
}

void validate_weights(const ScoreWeights& weights) {
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorKind::BadWeights, "score weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail(ErrorKind::BadWeights, "score weights must sum to 1");
}

Grade grade(const ScoreVector& scores, const ScoreWeights& weights, double threshold) {
    validate_weights(weights);
    if (!(threshold >= 0.0 && threshold <= 1.0)) fail(ErrorKind::BadWeights, "approval threshold must be in [0,1]");
    const auto values = scores.as_array();
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) total += weights[i] * values[i];
    total = std::clamp(total, 0.0, 1.0);
    return {total, total >= threshold};
}

AbstractEvaluator::AbstractEvaluator(const OntologyGraph& graph, const ConceptDictionary& dictionary,
                                     EvaluatorOptions options)
    : graph_(graph), dictionary_(dictionary), options_(options) {
    validate_weights(options_.weights);
    if (!(options_.threshold >= 0.0 && options_.threshold <= 1.0))
        fail(ErrorKind::BadWeights, "approval threshold must be in [0,1]");
    if (options_.top_k < 1) fail(ErrorKind::Config, "top-k must be >= 1");
}

ScoreVector AbstractEvaluator::score(const Question& question, const AnnotationSet& query, const AbstractDoc& doc,
                                     const AnnotationSet& abstract) const {
    return {jaccard_score(query, abstract), hierarchical_score(query, abstract, graph_),
            top_frequency_score(query, abstract, options_.top_k),
            sentence_similarity(question.body, doc.annotated_text(), dictionary_)};
}

GradedAbstract AbstractEvaluator::evaluate(const Question& question, const AnnotationSet& query,
                                           const AbstractDoc& doc, const AnnotationSet& abstract) const {
    GradedAbstract out{doc, score(question, query, doc, abstract), 0.0, false};
    const auto g = grade(out.scores, options_.weights, options_.threshold);
    out.grade = g.grade;
    out.approved = g.approved;
    return out;
}

}  // namespace ws4a
