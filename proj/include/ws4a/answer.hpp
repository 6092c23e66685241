#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ws4a/annotation.hpp"
#include "ws4a/domain.hpp"
#include "ws4a/evaluator.hpp"
#include "ws4a/gateway.hpp"
#include "ws4a/ontology.hpp"

namespace ws4a {

inline constexpr std::size_t kAnswerCap = 10;

enum class Section { Title, Abstract };

std::string_view to_string(Section section);
/// Accepts "title", "abstract" and the "sections.0" form used by gold files.
Section parse_section(std::string_view text);

struct Snippet {
    std::string pmid;
    Section section = Section::Abstract;
    std::size_t begin = 0;  // scalar-value offsets into the section text
    std::size_t end = 0;
    std::string text;
    double score = 0.0;
};

struct SentenceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Sentences end at '.', '?' or '!' followed by a space (or the end of the
/// text). Spans exclude surrounding whitespace and keep the terminator.
std::vector<SentenceSpan> split_sentences(std::string_view text);

/// Every sentence of every approved abstract scored by sentence_similarity
/// against the question; the best `cap`, ties by (pmid desc, begin asc).
std::vector<Snippet> select_snippets(const Question& question, std::span<const GradedAbstract> approved,
                                     const ConceptDictionary& dictionary, std::size_t cap = kAnswerCap);
std::vector<Snippet> select_snippets(const Question& question, std::span<const GradedAbstract> approved,
                                     const OntologyGraph& graph, std::size_t cap = kAnswerCap);

struct RankedConcept {
    ConceptAnnotation annotation;
    double score = 0.0;
};

struct ConceptSelection {
    /// Abstract concepts with a positive summed similarity to the query,
    /// best first (ties by concept id), at most `cap`.
    std::vector<RankedConcept> ranked;
    /// The ranked concepts the query was annotated with too.
    std::vector<ConceptAnnotation> intersection;
    /// `intersection` when non-empty, otherwise `ranked`.
    std::vector<ConceptAnnotation> output;
    /// MeSH subset of `intersection`; feeds triple generation.
    std::vector<ConceptAnnotation> triple_seeds;
};

ConceptSelection select_concepts(const AnnotationSet& query, std::span<const AnnotationSet> abstracts,
                                 const OntologyGraph& graph, std::size_t cap = kAnswerCap);
/// URIs of select_concepts(...).output.
std::vector<std::string> build_concepts(const AnnotationSet& query, std::span<const AnnotationSet> abstracts,
                                        const OntologyGraph& graph, std::size_t cap = kAnswerCap);

const std::vector<std::string>& stopwords();

/// Bag of words of a triple: tokens of URI local names and of literals,
/// minus stop-words.
std::vector<std::string> triple_terms(const Triple& triple);

/// Σ tf(t)·idf(t) with idf(t) = ln((1+N)/(1+df(t))) + 1 over the candidates;
/// sorted by score desc then (s, p, o); truncated to `cap`.
std::vector<Triple> tfidf_rank(std::vector<Triple> candidates, std::size_t cap = kAnswerCap);

struct TripleOptions {
    /// Prefix turning a MeSH descriptor id into the SPARQL resource URI.
    std::string mesh_resource_base = "http://id.nlm.nih.gov/mesh/";
    std::size_t per_concept_limit = 50;
};

struct TripleResult {
    std::vector<Triple> triples;
    bool degraded = false;
    std::vector<std::string> failures;
};

/// MeSH concepts only; gateway failures leave the list empty and degraded.
TripleResult build_triples(std::span<const ConceptAnnotation> concepts, ServiceGateway& gateway,
                           const TripleOptions& options = {}, std::size_t cap = kAnswerCap);

struct AnswerCaps {
    std::size_t documents = kAnswerCap;
    std::size_t snippets = kAnswerCap;
    std::size_t concepts = kAnswerCap;
    std::size_t triples = kAnswerCap;
};

struct AnswerSet {
    std::string question_id;
    std::vector<std::string> documents;  // PubMed URLs
    std::vector<Snippet> snippets;
    std::vector<std::string> concepts;  // URIs
    std::vector<Triple> triples;
};

/// Documents are the approved abstracts by grade (ties by larger pmid).
/// Throws CapViolation if any list handed in exceeds its cap.
AnswerSet emit_answer(const Question& question, std::span<const GradedAbstract> approved,
                      std::vector<Snippet> snippets, std::vector<std::string> concepts, std::vector<Triple> triples,
                      const AnswerCaps& caps = {}, std::string_view pubmed_base = Endpoints{}.pubmed);

/// `{"questions":[...]}` with a fixed field order; ends with a newline.
std::string serialize_answers(std::span<const AnswerSet> answers, std::string_view pubmed_base = Endpoints{}.pubmed);

}  // namespace ws4a
