#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ws4a/annotation.hpp"
#include "ws4a/domain.hpp"
#include "ws4a/gateway.hpp"

namespace ws4a {

using PmidProvenance = std::map<std::string, std::set<ConceptSource>>;

/// Numeric order on PubMed ids (which are digit strings of varying length).
bool pmid_less(std::string_view a, std::string_view b);

struct CandidatePool {
    std::string question_id;
    PmidProvenance pmid_provenance;
    /// Newest first; equal dates put the larger pmid first.
    std::vector<AbstractDoc> docs;
    bool degraded = false;
    std::vector<std::string> failures;
};

/// The `cap` newest documents by pub_date, ties broken by larger pmid.
/// Duplicate pmids keep their first occurrence.
std::vector<AbstractDoc> select_recent(std::vector<AbstractDoc> docs, std::size_t cap = 10);

/// esearch term for an annotation: the quoted label, with a [mesh] field
/// filter for MeSH concepts.
std::string esearch_term(const ConceptAnnotation& annotation);

struct RetrieverOptions {
    std::optional<SearchDate> mindate;
    Date cutoff = kDefaultCutoff;
    std::size_t recency_cap = 10;
    /// Per-query bound on pmids kept (numerically largest, i.e. most recent
    /// accessions), so broad chemical names stay fetchable.
    std::size_t max_pmids_per_query = 200;
};

struct GatherResult {
    PmidProvenance provenance;
    bool degraded = false;
    std::vector<std::string> failures;
};

class DocumentRetriever {
public:
    DocumentRetriever(ServiceGateway& gateway, RetrieverOptions options = {});

    /// MESH/GO/JOCHEM/DO labels go through esearch, CHEBI labels through
    /// PubChem, UNIPROT accessions through UniProt. Failed lookups degrade.
    GatherResult gather_pmids(const AnnotationSet& annotations) const;
    /// gather_pmids -> efetch -> cutoff filter -> select_recent.
    CandidatePool build_pool(const Question& question, const AnnotationSet& annotations) const;

    const RetrieverOptions& options() const { return options_; }

private:
    ServiceGateway& gateway_;
    RetrieverOptions options_;
};

}  // namespace ws4a
