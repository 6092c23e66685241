#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ws4a/annotation.hpp"
#include "ws4a/domain.hpp"
#include "ws4a/ontology.hpp"

namespace ws4a {

struct ScoreVector {
    double jaccard = 0.0;
    double hierarchical = 0.0;
    double top_frequency = 0.0;
    double sentence_similarity = 0.0;

    std::array<double, 4> as_array() const { return {jaccard, hierarchical, top_frequency, sentence_similarity}; }
    bool operator==(const ScoreVector&) const = default;
};

using ScoreWeights = std::array<double, 4>;

struct GradedAbstract {
    AbstractDoc doc;
    ScoreVector scores;
    double grade = 0.0;
    bool approved = false;
};

/// |Q ∩ A| / |Q ∪ A| over concept ids; 0 when both are empty.
double jaccard_score(const AnnotationSet& query, const AnnotationSet& abstract);

/// Similarity of two annotated concepts: 1 for the same concept, the
/// ontology's hierarchical similarity when both are in `graph` under the
/// same source, 0 otherwise (cross-source and uncovered pairs included).
double concept_similarity(const OntologyGraph& graph, const ConceptAnnotation& a, const ConceptAnnotation& b);

/// Mean over distinct query concepts of the best concept_similarity against
/// any abstract concept. Directional: the query side is averaged.
double hierarchical_score(const AnnotationSet& query, const AnnotationSet& abstract, const OntologyGraph& graph);

/// Concept ids ranked by their highest annotation score, ties by id.
std::vector<std::string> top_concepts(const AnnotationSet& annotations, std::size_t k);

/// |topK(Q) ∩ topK(A)| / k; the denominator stays k for short sides.
double top_frequency_score(const AnnotationSet& query, const AnnotationSet& abstract, std::size_t k = 5);

/// Cosine between term-frequency bags of tokens plus dictionary concepts.
double sentence_similarity(std::string_view query_text, std::string_view abstract_text,
                           const ConceptDictionary& dictionary);
double sentence_similarity(std::string_view query_text, std::string_view abstract_text, const OntologyGraph& graph);

/// Throws BadWeights unless weights are non-negative and sum to 1 (±1e-9).
void validate_weights(const ScoreWeights& weights);

struct Grade {
    double grade = 0.0;
    bool approved = false;
};

Grade grade(const ScoreVector& scores, const ScoreWeights& weights, double threshold);

struct EvaluatorOptions {
    ScoreWeights weights{0.25, 0.25, 0.25, 0.25};
    double threshold = 0.5;
    std::size_t top_k = 5;
};

/// Scores (question, abstract) pairs against one ontology graph.
class AbstractEvaluator {
public:
    AbstractEvaluator(const OntologyGraph& graph, const ConceptDictionary& dictionary, EvaluatorOptions options = {});

    ScoreVector score(const Question& question, const AnnotationSet& query, const AbstractDoc& doc,
                      const AnnotationSet& abstract) const;
    GradedAbstract evaluate(const Question& question, const AnnotationSet& query, const AbstractDoc& doc,
                            const AnnotationSet& abstract) const;

    const EvaluatorOptions& options() const { return options_; }

private:
    const OntologyGraph& graph_;
    const ConceptDictionary& dictionary_;
    EvaluatorOptions options_;
};

}  // namespace ws4a
