#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ws4a/domain.hpp"
#include "ws4a/gateway.hpp"
#include "ws4a/ontology.hpp"

namespace ws4a {

enum class AnnotationTarget { Question, Abstract };

/// Deduplicated on (concept_id, span) and ordered by (span_begin, source,
/// concept_id, span_end). `by_source` partitions `annotations`.
struct AnnotationSet {
    AnnotationTarget target = AnnotationTarget::Question;
    std::string target_id;
    std::vector<ConceptAnnotation> annotations;
    std::map<ConceptSource, std::vector<ConceptAnnotation>> by_source;
    /// Set when at least one annotation source failed.
    bool degraded = false;
    std::vector<std::string> failures;

    static AnnotationSet make(AnnotationTarget target, std::string target_id,
                              std::vector<ConceptAnnotation> annotations);

    std::set<std::string> concept_ids() const;
    bool empty() const { return annotations.empty(); }
};

/// Case-insensitive, word-boundary, longest-match-wins dictionary over the
/// labels of an ontology. Build once, scan many texts.
class ConceptDictionary {
public:
    ConceptDictionary() = default;
    explicit ConceptDictionary(const OntologyGraph& graph, std::optional<ConceptSource> only = std::nullopt);

    /// Among overlapping matches the longest wins (earlier start breaks
    /// ties); every concept sharing a winning label is reported.
    std::vector<ConceptAnnotation> scan(std::string_view text) const;
    std::size_t size() const { return entries_.size(); }

private:
    struct Entry {
        std::u32string folded_label;
        ConceptAnnotation annotation;  // span fields unused
    };
    std::vector<Entry> entries_;
    std::unordered_map<char32_t, std::vector<std::size_t>> by_first_char_;
};

std::vector<ConceptAnnotation> local_dictionary_scan(std::string_view text, const OntologyGraph& graph,
                                                     std::optional<ConceptSource> only = std::nullopt);

struct AnnotationOptions {
    AnnotatorParams params;
    bool use_remote_annotator = true;
    bool use_whatizit = true;
    std::string whatizit_vocabulary = "swissprot";
};

/// Merges three annotation sources: the remote annotator, the local ChEBI
/// dictionary and the Whatizit -> UniProt chain. A failing source marks the
/// result degraded instead of aborting; replay misses still propagate.
class AnnotationEngine {
public:
    /// Either pointer may be null to disable the corresponding sources.
    AnnotationEngine(ServiceGateway* gateway, const ConceptDictionary* local_dictionary,
                     AnnotationOptions options = {});

    AnnotationSet annotate_question(const Question& question) const;
    /// Annotates `title + " " + text`.
    AnnotationSet annotate_abstract(const AbstractDoc& doc) const;
    AnnotationSet annotate_text(AnnotationTarget target, std::string target_id, std::string_view text) const;

private:
    ServiceGateway* gateway_;
    const ConceptDictionary* dictionary_;
    AnnotationOptions options_;
};

/// First case-insensitive, word-bounded occurrence of `mention` in `text`.
std::optional<std::pair<std::size_t, std::size_t>> find_mention(std::u32string_view text, std::string_view mention);

}  // namespace ws4a
