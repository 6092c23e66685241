#include "ws4a/answer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "ws4a/error.hpp"
#include "ws4a/retriever.hpp"
#include "ws4a/stopwords_data.hpp"
#include "ws4a/text.hpp"

namespace ws4a {

std::string_view to_string(Section section) { return section == Section::Title ? "title" : "abstract"; }

Section parse_section(std::string_view text) {
    if (text == "title") return Section::Title;
    if (text == "abstract" || text == "sections.0") return Section::Abstract;
    fail(ErrorKind::SchemaMismatch, "unknown snippet section '" + std::string(text) + "'");
}

std::vector<SentenceSpan> split_sentences(std::string_view text) {
    const auto decoded = utf8_decode(text);
    const auto is_space = [](char32_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    std::vector<SentenceSpan> out;
    const auto emit = [&](std::size_t begin, std::size_t end) {
        while (begin < end && is_space(decoded[begin])) ++begin;
        while (end > begin && is_space(decoded[end - 1])) --end;
        if (begin < end) out.push_back({begin, end});
    };
    std::size_t start = 0;
    for (std::size_t i = 0; i < decoded.size(); ++i) {
        const char32_t c = decoded[i];
        if ((c == '.' || c == '?' || c == '!') && (i + 1 == decoded.size() || decoded[i + 1] == ' ')) {
            emit(start, i + 1);
            start = i + 1;
        }
    }
    emit(start, decoded.size());
    return out;
}

std::vector<Snippet> select_snippets(const Question& question, std::span<const GradedAbstract> approved,
                                     const ConceptDictionary& dictionary, std::size_t cap) {
    std::vector<Snippet> candidates;
    for (const auto& graded : approved) {
        const auto decoded = utf8_decode(graded.doc.text);
        for (const auto& span : split_sentences(graded.doc.text)) {
            Snippet snippet;
            snippet.pmid = graded.doc.pmid;
            snippet.section = Section::Abstract;
            snippet.begin = span.begin;
            snippet.end = span.end;
            snippet.text = utf8_encode(std::u32string_view(decoded).substr(span.begin, span.end - span.begin));
            snippet.score = sentence_similarity(question.body, snippet.text, dictionary);
            candidates.push_back(std::move(snippet));
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Snippet& a, const Snippet& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.pmid != b.pmid) return pmid_less(b.pmid, a.pmid);
        return a.begin < b.begin;
    });
    if (candidates.size() > cap) candidates.resize(cap);
    return candidates;
}

std::vector<Snippet> select_snippets(const Question& question, std::span<const GradedAbstract> approved,
                                     const OntologyGraph& graph, std::size_t cap) {
    return select_snippets(question, approved, ConceptDictionary(graph), cap);
}

ConceptSelection select_concepts(const AnnotationSet& query, std::span<const AnnotationSet> abstracts,
                                 const OntologyGraph& graph, std::size_t cap) {
    std::vector<const ConceptAnnotation*> query_concepts;
    std::set<std::string> query_ids;
    for (const auto& annotation : query.annotations)
        if (query_ids.insert(annotation.concept_id).second) query_concepts.push_back(&annotation);

    std::vector<RankedConcept> ranked;
    std::set<std::string> seen;
    for (const auto& set : abstracts) {
        for (const auto& annotation : set.annotations) {
            if (!seen.insert(annotation.concept_id).second) continue;
            double total = 0.0;
            for (const auto* q : query_concepts) total += concept_similarity(graph, annotation, *q);
            if (total > 0.0) ranked.push_back({annotation, total});
        }
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedConcept& a, const RankedConcept& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.annotation.concept_id < b.annotation.concept_id;
    });
    if (ranked.size() > cap) ranked.resize(cap);

    ConceptSelection selection;
    selection.ranked = std::move(ranked);
    for (const auto& item : selection.ranked)
        if (query_ids.count(item.annotation.concept_id)) selection.intersection.push_back(item.annotation);
    if (!selection.intersection.empty()) {
        selection.output = selection.intersection;
    } else {
        for (const auto& item : selection.ranked) selection.output.push_back(item.annotation);
    }
    selection.triple_seeds = mesh_only(selection.intersection);
    return selection;
}

std::vector<std::string> build_concepts(const AnnotationSet& query, std::span<const AnnotationSet> abstracts,
                                        const OntologyGraph& graph, std::size_t cap) {
    std::vector<std::string> out;
    for (const auto& c : select_concepts(query, abstracts, graph, cap).output) out.push_back(c.concept_uri);
    return out;
}

const std::vector<std::string>& stopwords() {
    static const std::vector<std::string> kWords = [] {
        std::vector<std::string> words;
        std::istringstream in(detail::kStopwordData);
        std::string word;
        while (in >> word) words.push_back(to_lower(word));
        std::sort(words.begin(), words.end());
        return words;
    }();
    return kWords;
}

std::vector<std::string> triple_terms(const Triple& triple) {
    const auto& stop = stopwords();
    std::vector<std::string> out;
    const auto add = [&](const std::string& value, bool literal) {
        std::string_view text = value;
        if (!literal) {
            const auto cut = text.find_last_of("/#");
            if (cut != std::string_view::npos && cut + 1 < text.size()) text = text.substr(cut + 1);
        }
        for (auto& token : tokenize(text))
            if (!std::binary_search(stop.begin(), stop.end(), token.surface)) out.push_back(std::move(token.surface));
    };
    add(triple.subject, false);
    add(triple.predicate, false);
    add(triple.object, triple.object_is_literal);
    return out;
}

std::vector<Triple> tfidf_rank(std::vector<Triple> candidates, std::size_t cap) {
    const double n = static_cast<double>(candidates.size());
    std::vector<std::map<std::string, double>> term_frequency;
    std::map<std::string, double> document_frequency;
    for (const auto& triple : candidates) {
        std::map<std::string, double> tf;
        for (auto& term : triple_terms(triple)) tf[std::move(term)] += 1.0;
        for (const auto& [term, count] : tf) document_frequency[term] += 1.0;
        term_frequency.push_back(std::move(tf));
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        double score = 0.0;
        for (const auto& [term, count] : term_frequency[i])
            score += count * (std::log((1.0 + n) / (1.0 + document_frequency[term])) + 1.0);
        candidates[i].score = score;
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Triple& a, const Triple& b) {
        if (a.score != b.score) return a.score > b.score;
        return std::tie(a.subject, a.predicate, a.object) < std::tie(b.subject, b.predicate, b.object);
    });
    if (candidates.size() > cap) candidates.resize(cap);
    return candidates;
}

TripleResult build_triples(std::span<const ConceptAnnotation> concepts, ServiceGateway& gateway,
                           const TripleOptions& options, std::size_t cap) {
    TripleResult result;
    std::vector<std::string> uris;
    std::set<std::string> seen;
    for (const auto& c : mesh_only(concepts))
        if (seen.insert(c.concept_id).second) uris.push_back(options.mesh_resource_base + c.concept_id);
    if (uris.empty()) return result;
    try {
        result.triples = tfidf_rank(gateway.sparql_triples(uris, options.per_concept_limit), cap);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Transport && e.kind() != ErrorKind::Parse) throw;
        result.degraded = true;
        result.failures.push_back(std::string("sparql: ") + e.what());
    }
    return result;
}

AnswerSet emit_answer(const Question& question, std::span<const GradedAbstract> approved,
                      std::vector<Snippet> snippets, std::vector<std::string> concepts, std::vector<Triple> triples,
                      const AnswerCaps& caps, std::string_view pubmed_base) {
    if (snippets.size() > caps.snippets || concepts.size() > caps.concepts || triples.size() > caps.triples)
        fail(ErrorKind::CapViolation, "answer for " + question.id + " exceeds its list caps");
    std::vector<const GradedAbstract*> ranked;
    for (const auto& graded : approved) ranked.push_back(&graded);
    std::stable_sort(ranked.begin(), ranked.end(), [](const GradedAbstract* a, const GradedAbstract* b) {
        if (a->grade != b->grade) return a->grade > b->grade;
        return pmid_less(b->doc.pmid, a->doc.pmid);
    });
    AnswerSet answer;
    answer.question_id = question.id;
    std::set<std::string> seen;
    for (const auto* graded : ranked) {
        if (answer.documents.size() >= caps.documents) break;
        if (seen.insert(graded->doc.pmid).second)
            answer.documents.push_back(build_document_url(graded->doc.pmid, pubmed_base));
    }
    answer.snippets = std::move(snippets);
    answer.concepts = std::move(concepts);
    answer.triples = std::move(triples);
    return answer;
}

std::string serialize_answers(std::span<const AnswerSet> answers, std::string_view pubmed_base) {
    using nlohmann::ordered_json;
    ordered_json questions = ordered_json::array();
    for (const auto& answer : answers) {
        ordered_json q;
        q["id"] = answer.question_id;
        q["documents"] = answer.documents;
        ordered_json snippets = ordered_json::array();
        for (const auto& snippet : answer.snippets) {
            ordered_json s;
            s["document"] = build_document_url(snippet.pmid, pubmed_base);
            s["beginSection"] = to_string(snippet.section);
            s["endSection"] = to_string(snippet.section);
            s["offsetInBeginSection"] = snippet.begin;
            s["offsetInEndSection"] = snippet.end;
            s["text"] = snippet.text;
            snippets.push_back(std::move(s));
        }
        q["snippets"] = std::move(snippets);
        q["concepts"] = answer.concepts;
        ordered_json triples = ordered_json::array();
        for (const auto& triple : answer.triples) {
            ordered_json t;
            t["s"] = triple.subject;
            t["p"] = triple.predicate;
            t["o"] = triple.object;
            triples.push_back(std::move(t));
        }
        q["triples"] = std::move(triples);
        questions.push_back(std::move(q));
    }
    ordered_json doc;
    doc["questions"] = std::move(questions);
    return doc.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

}  // namespace ws4a
