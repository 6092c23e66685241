#include "ws4a/annotation.hpp"

#include <algorithm>
#include <tuple>

#include "ws4a/error.hpp"
#include "ws4a/text.hpp"

namespace ws4a {

namespace {

bool at_boundary(std::u32string_view text, std::size_t begin, std::size_t end) {
    const bool left = begin == 0 || !is_word_char(text[begin - 1]);
    const bool right = end == text.size() || !is_word_char(text[end]);
    return left && right;
}

auto ordering_key(const ConceptAnnotation& a) {
    return std::tie(a.span_begin, a.source, a.concept_id, a.span_end);
}

bool recoverable(const Error& e) { return e.kind() == ErrorKind::Transport || e.kind() == ErrorKind::Parse; }

}  // namespace

AnnotationSet AnnotationSet::make(AnnotationTarget target, std::string target_id,
                                  std::vector<ConceptAnnotation> annotations) {
    AnnotationSet set;
    set.target = target;
    set.target_id = std::move(target_id);
    std::set<std::tuple<std::string, std::size_t, std::size_t>> seen;
    for (auto& annotation : annotations) {
        if (seen.emplace(annotation.concept_id, annotation.span_begin, annotation.span_end).second)
            set.annotations.push_back(std::move(annotation));
    }
    std::stable_sort(set.annotations.begin(), set.annotations.end(),
                     [](const auto& a, const auto& b) { return ordering_key(a) < ordering_key(b); });
    for (const auto& annotation : set.annotations) set.by_source[annotation.source].push_back(annotation);
    return set;
}

std::set<std::string> AnnotationSet::concept_ids() const {
    std::set<std::string> out;
    for (const auto& annotation : annotations) out.insert(annotation.concept_id);
    return out;
}

ConceptDictionary::ConceptDictionary(const OntologyGraph& graph, std::optional<ConceptSource> only) {
    for (const auto& [id, node] : graph.nodes()) {
        if (only && node.source != *only) continue;
        auto folded = fold_case(utf8_decode(node.label));
        if (folded.empty()) continue;
        ConceptAnnotation entry;
        entry.concept_id = node.id;
        entry.concept_uri = node.uri;
        entry.label = node.label;
        entry.source = node.source;
        entry.score = 1.0;
        by_first_char_[folded.front()].push_back(entries_.size());
        entries_.push_back({std::move(folded), std::move(entry)});
    }
}

std::vector<ConceptAnnotation> ConceptDictionary::scan(std::string_view text) const {
    const auto folded = fold_case(utf8_decode(text));
    const std::u32string_view view(folded);

    struct Match {
        std::size_t begin, end, entry;
    };
    std::vector<Match> matches;
    for (std::size_t i = 0; i < view.size(); ++i) {
        if (i > 0 && is_word_char(view[i - 1])) continue;
        auto bucket = by_first_char_.find(view[i]);
        if (bucket == by_first_char_.end()) continue;
        for (std::size_t index : bucket->second) {
            const auto& label = entries_[index].folded_label;
            if (view.substr(i, label.size()) != label) continue;
            if (!at_boundary(view, i, i + label.size())) continue;
            matches.push_back({i, i + label.size(), index});
        }
    }

    // Winning spans: longest first, earlier start on ties, no overlaps.
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (const auto& m : matches) spans.emplace_back(m.begin, m.end);
    std::sort(spans.begin(), spans.end());
    spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
    std::stable_sort(spans.begin(), spans.end(), [](const auto& a, const auto& b) {
        return (a.second - a.first) > (b.second - b.first);
    });
    std::set<std::pair<std::size_t, std::size_t>> accepted;
    for (const auto& span : spans) {
        const bool overlaps = std::any_of(accepted.begin(), accepted.end(), [&](const auto& other) {
            return span.first < other.second && other.first < span.second;
        });
        if (!overlaps) accepted.insert(span);
    }

    std::vector<ConceptAnnotation> out;
    for (const auto& m : matches) {
        if (!accepted.count({m.begin, m.end})) continue;
        ConceptAnnotation annotation = entries_[m.entry].annotation;
        annotation.span_begin = m.begin;
        annotation.span_end = m.end;
        out.push_back(std::move(annotation));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(a.span_begin, a.concept_id) < std::tie(b.span_begin, b.concept_id);
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const auto& a, const auto& b) {
                              return a.span_begin == b.span_begin && a.concept_id == b.concept_id;
                          }),
              out.end());
    return out;
}

std::vector<ConceptAnnotation> local_dictionary_scan(std::string_view text, const OntologyGraph& graph,
                                                     std::optional<ConceptSource> only) {
    return ConceptDictionary(graph, only).scan(text);
}

std::optional<std::pair<std::size_t, std::size_t>> find_mention(std::u32string_view text, std::string_view mention) {
    const auto needle = fold_case(utf8_decode(trim(mention)));
    if (needle.empty() || needle.size() > text.size()) return std::nullopt;
    const auto haystack = fold_case(text);
    for (std::size_t pos = haystack.find(needle); pos != std::u32string::npos; pos = haystack.find(needle, pos + 1)) {
        if (at_boundary(haystack, pos, pos + needle.size())) return std::pair{pos, pos + needle.size()};
    }
    return std::nullopt;
}

AnnotationEngine::AnnotationEngine(ServiceGateway* gateway, const ConceptDictionary* local_dictionary,
                                   AnnotationOptions options)
    : gateway_(gateway), dictionary_(local_dictionary), options_(std::move(options)) {}

AnnotationSet AnnotationEngine::annotate_question(const Question& question) const {
    validate(question);
    return annotate_text(AnnotationTarget::Question, question.id, question.body);
}

AnnotationSet AnnotationEngine::annotate_abstract(const AbstractDoc& doc) const {
    if (!is_pmid(doc.pmid)) fail(ErrorKind::InvalidArgument, "abstract has an invalid PubMed id '" + doc.pmid + "'");
    return annotate_text(AnnotationTarget::Abstract, doc.pmid, doc.annotated_text());
}

AnnotationSet AnnotationEngine::annotate_text(AnnotationTarget target, std::string target_id,
                                              std::string_view text) const {
    const auto decoded = utf8_decode(text);
    std::vector<ConceptAnnotation> collected;
    std::vector<std::string> failures;
    const bool has_text = !trim(text).empty();

    if (gateway_ && options_.use_remote_annotator && has_text) {
        try {
            for (auto& annotation : gateway_->annotate_remote(text, options_.params))
                collected.push_back(std::move(annotation));
        } catch (const Error& e) {
            if (!recoverable(e)) throw;
            failures.push_back(std::string("annotator: ") + e.what());
        }
    }
    if (dictionary_) {
        for (auto& annotation : dictionary_->scan(text)) collected.push_back(std::move(annotation));
    }
    if (gateway_ && options_.use_whatizit && has_text) {
        try {
            for (const auto& mention : gateway_->whatizit_mentions(text, options_.whatizit_vocabulary)) {
                ConceptAnnotation annotation;
                annotation.concept_id = mention.accession;
                annotation.concept_uri = concept_uri(ConceptSource::Uniprot, mention.accession);
                annotation.source = ConceptSource::Uniprot;
                annotation.label = mention.mention.empty() ? mention.accession : mention.mention;
                annotation.score = 1.0;
                const auto span = find_mention(decoded, mention.mention);
                annotation.span_begin = span ? span->first : 0;
                annotation.span_end = span ? span->second : decoded.size();
                collected.push_back(std::move(annotation));
            }
        } catch (const Error& e) {
            if (!recoverable(e)) throw;
            failures.push_back(std::string("whatizit: ") + e.what());
        }
    }

    for (const auto& annotation : collected) validate(annotation, decoded.size());
    auto set = AnnotationSet::make(target, std::move(target_id), std::move(collected));
    set.degraded = !failures.empty();
    set.failures = std::move(failures);
    return set;
}

}  // namespace ws4a
