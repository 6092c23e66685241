#pragma once

#include <cstddef>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ws4a/domain.hpp"
#include "ws4a/transport.hpp"

namespace ws4a {

/// Base URLs of every remote service. Defaults are the historical hosts.
struct Endpoints {
    std::string annotator = "http://data.bioontology.org/annotator";
    std::string pubchem = "https://pubchem.ncbi.nlm.nih.gov/rest/pug";
    std::string uniprot = "http://www.uniprot.org/uniprot";
    std::string whatizit = "http://www.ebi.ac.uk/webservices/whatizit/pipe";
    std::string eutils = "http://eutils.ncbi.nlm.nih.gov/entrez/eutils";
    std::string pubmed = "http://www.ncbi.nlm.nih.gov/pubmed";
    std::string sparql = "http://linkedlifedata.com/sparql";
};

/// Which XML element of a Whatizit response carries UniProt accessions, and
/// in which attribute (comma- or space-separated).
struct WhatizitSchema {
    std::string tag = "z:uniprot";
    std::string id_attribute = "ids";
};

struct AnnotatorParams {
    bool longest_only = false;
    bool exclude_numbers = false;
    bool whole_word_only = true;
    bool exclude_synonyms = false;
    std::vector<ConceptSource> ontologies{ConceptSource::Mesh, ConceptSource::Go, ConceptSource::Jochem,
                                          ConceptSource::Do};
};

/// esearch date: a bare year when `month` is 0, otherwise YYYY/MM/DD.
struct SearchDate {
    int year = 0;
    int month = 0;
    int day = 0;

    static SearchDate from(const Date& date) { return {date.year, date.month, date.day}; }
    /// Last calendar day this value covers (Dec 31 for a bare year).
    Date latest() const;
    std::string format() const;
};

// Pure URL builders; byte-exact for a given input.
std::string build_annotator_url(std::string_view text, const AnnotatorParams& params,
                                std::string_view base = Endpoints{}.annotator);
std::string build_pubchem_url(std::string_view word, std::string_view base = Endpoints{}.pubchem);
/// Throws BadAccession unless `accession` is a UniProt accession.
std::string build_uniprot_url(std::string_view accession, std::string_view base = Endpoints{}.uniprot);
std::string build_whatizit_url(std::string_view vocabulary, std::string_view base = Endpoints{}.whatizit);
/// Throws CutoffViolation when maxdate extends past `cutoff`.
std::string build_esearch_url(std::string_view term, const std::optional<SearchDate>& mindate,
                              const SearchDate& maxdate, const Date& cutoff = kDefaultCutoff,
                              std::string_view base = Endpoints{}.eutils);
std::string build_efetch_url(std::span<const std::string> pmids, std::string_view base = Endpoints{}.eutils);
std::string build_document_url(std::string_view pmid, std::string_view base = Endpoints{}.pubmed);
std::string build_sparql_query(std::string_view concept_uri, std::size_t limit);
std::string build_sparql_url(std::string_view concept_uri, std::size_t limit,
                             std::string_view base = Endpoints{}.sparql);

bool is_uniprot_accession(std::string_view text);

struct WhatizitMention {
    std::string accession;
    std::string mention;  // surface text of the tagged element
};

// Response parsers. All throw Parse on malformed or truncated payloads.
std::vector<ConceptAnnotation> parse_annotator_response(std::string_view json, std::string_view text);
std::vector<std::string> parse_pubchem_response(std::string_view json);
std::vector<std::string> parse_uniprot_response(std::string_view xml);
std::vector<WhatizitMention> parse_whatizit_response(std::string_view xml, const WhatizitSchema& schema = {});
std::vector<std::string> parse_esearch_response(std::string_view xml);
/// Records without an abstract are dropped. Year-only dates become Jan 1.
std::vector<AbstractDoc> parse_efetch_response(std::string_view xml);
std::vector<Triple> parse_sparql_response(std::string_view json);

struct GatewayOptions {
    Endpoints endpoints;
    WhatizitSchema whatizit;
    Date cutoff = kDefaultCutoff;
    std::size_t efetch_chunk = 200;
    std::ptrdiff_t parallelism = 4;
};

/// Typed clients for every remote service, all routed through one
/// Transport so record/replay applies uniformly. Safe for concurrent use;
/// at most `parallelism` requests are in flight.
class ServiceGateway {
public:
    ServiceGateway(Transport& transport, GatewayOptions options = {});

    const GatewayOptions& options() const { return options_; }

    std::vector<ConceptAnnotation> annotate_remote(std::string_view text, const AnnotatorParams& params);
    std::vector<std::string> pubchem_pmids(std::string_view word);
    std::vector<std::string> uniprot_pmids(std::string_view accession);
    std::vector<WhatizitMention> whatizit_mentions(std::string_view text, std::string_view vocabulary);
    std::vector<std::string> whatizit_accessions(std::string_view text, std::string_view vocabulary);
    std::vector<std::string> esearch_pmids(std::string_view term, const std::optional<SearchDate>& mindate,
                                           const SearchDate& maxdate);
    /// Chunks `pmids` into requests of at most `efetch_chunk` ids.
    std::vector<AbstractDoc> efetch_abstracts(std::span<const std::string> pmids);
    /// One query per URI; at most `limit` triples per URI, in request order.
    std::vector<Triple> sparql_triples(std::span<const std::string> concept_uris, std::size_t limit);

private:
    HttpResponse fetch(const ServiceRequest& request);

    Transport& transport_;
    GatewayOptions options_;
    std::counting_semaphore<> in_flight_;
};

}  // namespace ws4a
