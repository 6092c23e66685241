#include "ws4a/retriever.hpp"

#include <algorithm>
#include <tuple>

#include "ws4a/error.hpp"

namespace ws4a {

namespace {

std::string_view strip_zeros(std::string_view pmid) {
    while (pmid.size() > 1 && pmid.front() == '0') pmid.remove_prefix(1);
    return pmid;
}

bool recoverable(const Error& e) { return e.kind() == ErrorKind::Transport || e.kind() == ErrorKind::Parse; }

enum class Route { Esearch, Pubchem, Uniprot };

Route route_for(ConceptSource source) {
    switch (source) {
        case ConceptSource::Chebi: return Route::Pubchem;
        case ConceptSource::Uniprot: return Route::Uniprot;
        default: return Route::Esearch;
    }
}

}  // namespace

bool pmid_less(std::string_view a, std::string_view b) {
    a = strip_zeros(a);
    b = strip_zeros(b);
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

std::vector<AbstractDoc> select_recent(std::vector<AbstractDoc> docs, std::size_t cap) {
    if (cap < 1) fail(ErrorKind::InvalidArgument, "select_recent: cap must be >= 1");
    std::set<std::string> seen;
    std::vector<AbstractDoc> unique;
    for (auto& doc : docs)
        if (seen.insert(doc.pmid).second) unique.push_back(std::move(doc));
    std::stable_sort(unique.begin(), unique.end(), [](const AbstractDoc& a, const AbstractDoc& b) {
        if (a.pub_date != b.pub_date) return a.pub_date > b.pub_date;
        return pmid_less(b.pmid, a.pmid);
    });
    if (unique.size() > cap) unique.resize(cap);
    return unique;
}

std::string esearch_term(const ConceptAnnotation& annotation) {
    std::string term = "\"" + annotation.label + "\"";
    if (annotation.source == ConceptSource::Mesh) term += "[mesh]";
    return term;
}

DocumentRetriever::DocumentRetriever(ServiceGateway& gateway, RetrieverOptions options)
    : gateway_(gateway), options_(std::move(options)) {
    if (options_.recency_cap < 1) fail(ErrorKind::Config, "recency cap must be >= 1");
    if (options_.max_pmids_per_query < 1) fail(ErrorKind::Config, "max pmids per query must be >= 1");
}

GatherResult DocumentRetriever::gather_pmids(const AnnotationSet& annotations) const {
    if (annotations.target != AnnotationTarget::Question)
        fail(ErrorKind::InvalidArgument, "gather_pmids expects question annotations");

    // One lookup per distinct (route, query); each remembers which sources asked.
    std::map<std::pair<Route, std::string>, std::set<ConceptSource>> queries;
    for (const auto& annotation : annotations.annotations) {
        const Route route = route_for(annotation.source);
        std::string query = route == Route::Esearch ? esearch_term(annotation)
                            : route == Route::Pubchem ? annotation.label
                                                      : annotation.concept_id;
        queries[{route, std::move(query)}].insert(annotation.source);
    }

    const SearchDate maxdate = SearchDate::from(options_.cutoff);
    GatherResult result;
    for (const auto& [query, sources] : queries) {
        const auto& [route, text] = query;
        std::vector<std::string> pmids;
        try {
            switch (route) {
                case Route::Esearch: pmids = gateway_.esearch_pmids(text, options_.mindate, maxdate); break;
                case Route::Pubchem: pmids = gateway_.pubchem_pmids(text); break;
                case Route::Uniprot: pmids = gateway_.uniprot_pmids(text); break;
            }
        } catch (const Error& e) {
            if (!recoverable(e) && e.kind() != ErrorKind::BadAccession) throw;
            result.degraded = true;
            result.failures.push_back(text + ": " + e.what());
            continue;
        }
        if (pmids.size() > options_.max_pmids_per_query) {
            std::sort(pmids.begin(), pmids.end(), [](const auto& a, const auto& b) { return pmid_less(b, a); });
            pmids.resize(options_.max_pmids_per_query);
        }
        for (const auto& pmid : pmids) result.provenance[pmid].insert(sources.begin(), sources.end());
    }
    return result;
}

CandidatePool DocumentRetriever::build_pool(const Question& question, const AnnotationSet& annotations) const {
    if (annotations.target_id != question.id)
        fail(ErrorKind::InvalidArgument, "annotations for " + annotations.target_id + " used for question " +
                                             question.id);
    CandidatePool pool;
    pool.question_id = question.id;
    auto gathered = gather_pmids(annotations);
    pool.pmid_provenance = std::move(gathered.provenance);
    pool.degraded = gathered.degraded;
    pool.failures = std::move(gathered.failures);
    if (pool.pmid_provenance.empty()) return pool;

    std::vector<std::string> pmids;
    for (const auto& [pmid, sources] : pool.pmid_provenance) pmids.push_back(pmid);
    std::sort(pmids.begin(), pmids.end(), [](const auto& a, const auto& b) { return pmid_less(b, a); });

    std::vector<AbstractDoc> fetched;
    try {
        fetched = gateway_.efetch_abstracts(pmids);
    } catch (const Error& e) {
        if (!recoverable(e)) throw;
        pool.degraded = true;
        pool.failures.push_back(std::string("efetch: ") + e.what());
        return pool;
    }
    std::erase_if(fetched, [&](const AbstractDoc& doc) {
        return doc.pub_date > options_.cutoff || !pool.pmid_provenance.count(doc.pmid);
    });
    pool.docs = select_recent(std::move(fetched), options_.recency_cap);
    return pool;
}

}  // namespace ws4a
