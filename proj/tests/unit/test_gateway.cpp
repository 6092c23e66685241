#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <mutex>
#include <thread>

#include "ws4a/error.hpp"
#include "ws4a/gateway.hpp"

using namespace ws4a;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::InvalidArgument;
}

/// Answers from a URL map (404 otherwise) and logs every request.
class ScriptedTransport : public Transport {
public:
    std::map<std::string, HttpResponse> responses;
    std::vector<ServiceRequest> log;

    HttpResponse send(const ServiceRequest& request) override {
        std::lock_guard lock(mutex_);
        log.push_back(request);
        auto it = responses.find(request.url);
        return it == responses.end() ? HttpResponse{404, "text/plain", "not found"} : it->second;
    }

private:
    std::mutex mutex_;
};

const char* kEfetch = R"(<?xml version="1.0"?>
<!DOCTYPE PubmedArticleSet>
<PubmedArticleSet>
 <PubmedArticle><MedlineCitation><PMID Version="1">26580448</PMID><Article>
  <Journal><JournalIssue><PubDate><Year>2015</Year><Month>Nov</Month><Day>18</Day></PubDate></JournalIssue></Journal>
  <ArticleTitle>Metformin and <i>cancer</i>.</ArticleTitle>
  <Abstract><AbstractText Label="BACKGROUND">First part.</AbstractText><AbstractText Label="RESULTS">TGF-&#946; rises.</AbstractText></Abstract>
 </Article></MedlineCitation></PubmedArticle>
 <PubmedArticle><MedlineCitation><PMID>26577665</PMID><Article>
  <Journal><JournalIssue><PubDate><Year>2015</Year></PubDate></JournalIssue></Journal>
  <ArticleTitle>No abstract here.</ArticleTitle>
 </Article></MedlineCitation></PubmedArticle>
 <PubmedArticle><MedlineCitation><PMID>26575237</PMID><Article>
  <Journal><JournalIssue><PubDate><MedlineDate>2014 Dec-2015 Jan</MedlineDate></PubDate></JournalIssue></Journal>
  <ArticleTitle>Dated loosely.</ArticleTitle>
  <Abstract><AbstractText>Only text.</AbstractText></Abstract>
 </Article></MedlineCitation></PubmedArticle>
 <PubmedArticle><MedlineCitation><PMID>26580161</PMID><Article>
  <Journal><JournalIssue><PubDate><Year>2015</Year></PubDate></JournalIssue></Journal>
  <ArticleTitle>Year only.</ArticleTitle>
  <Abstract><AbstractText>Text.</AbstractText></Abstract>
 </Article></MedlineCitation></PubmedArticle>
</PubmedArticleSet>)";

}  // namespace

TEST_CASE("historical URLs are reproduced byte for byte") {
    CHECK(build_pubchem_url("oxygen") ==
          "https://pubchem.ncbi.nlm.nih.gov/rest/pug/compound/name/oxygen/xrefs/PubMedID/JSON");
    CHECK(build_uniprot_url("P12345") == "http://www.uniprot.org/uniprot/P12345.xml");
    CHECK(build_esearch_url(" AND (GENES[mesh] )", SearchDate{2014}, SearchDate{2015, 11, 19}) ==
          "http://eutils.ncbi.nlm.nih.gov/entrez/eutils/esearch.fcgi?db=pubmed&mindate=2014&maxdate=2015/11/19"
          "&term=+AND+%28GENES%5Bmesh%5D+%29");
    const std::vector<std::string> ids{"26580448", "26580161", "26575237", "26577665"};
    CHECK(build_efetch_url(ids) ==
          "http://eutils.ncbi.nlm.nih.gov/entrez/eutils/efetch.fcgi?db=pubmed&retmode=xml"
          "&id=26580448,26580161,26575237,26577665");
    CHECK(build_document_url("23687640") == "http://www.ncbi.nlm.nih.gov/pubmed/23687640");
}

TEST_CASE("other builders") {
    CHECK(build_annotator_url("breast cancer", AnnotatorParams{}) ==
          "http://data.bioontology.org/annotator?text=breast+cancer&ontologies=MESH,GO,JOCHEM,DOID"
          "&longest_only=false&exclude_numbers=false&whole_word_only=true&exclude_synonyms=false");
    CHECK(build_whatizit_url("swissprot") == "http://www.ebi.ac.uk/webservices/whatizit/pipe/swissprot");
    CHECK(build_pubchem_url("vitamin c", "http://local/pug/") ==
          "http://local/pug/compound/name/vitamin%20c/xrefs/PubMedID/JSON");
    CHECK(build_esearch_url("x", std::nullopt, SearchDate{2015}, Date{2015, 12, 31}, "http://e") ==
          "http://e/esearch.fcgi?db=pubmed&maxdate=2015&term=x");
    CHECK(build_sparql_query("http://id.nlm.nih.gov/mesh/D1", 5) ==
          "SELECT ?s ?p ?o WHERE { { <http://id.nlm.nih.gov/mesh/D1> ?p ?o . BIND(<http://id.nlm.nih.gov/mesh/D1> "
          "AS ?s) } UNION { ?s ?p <http://id.nlm.nih.gov/mesh/D1> . BIND(<http://id.nlm.nih.gov/mesh/D1> AS ?o) } "
          "} LIMIT 5");
    CHECK(build_sparql_url("u", 1).starts_with("http://linkedlifedata.com/sparql?query=SELECT+%3Fs"));
}

TEST_CASE("builder preconditions") {
    CHECK(kind_of([] { build_uniprot_url("INSR_HUMAN"); }) == ErrorKind::BadAccession);
    CHECK(kind_of([] { build_uniprot_url(""); }) == ErrorKind::BadAccession);
    CHECK(is_uniprot_accession("A0A023GPI8"));
    CHECK(is_uniprot_accession("Q9H0H5"));
    CHECK_FALSE(is_uniprot_accession("p12345"));
    CHECK(kind_of([] { build_esearch_url("x", std::nullopt, SearchDate{2015, 11, 20}); }) ==
          ErrorKind::CutoffViolation);
    CHECK(kind_of([] { build_esearch_url("x", std::nullopt, SearchDate{2015}); }) == ErrorKind::CutoffViolation);
    CHECK(kind_of([] { build_efetch_url(std::vector<std::string>{}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { build_efetch_url(std::vector<std::string>{"12", "x1"}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { build_document_url("PMC1"); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { build_pubchem_url(""); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { build_sparql_url("u", 0); }) == ErrorKind::InvalidArgument);
    CHECK(SearchDate{2015}.latest() == Date{2015, 12, 31});
    CHECK(SearchDate{2015, 2, 3}.format() == "2015/02/03");
}

TEST_CASE("annotator responses map to concepts with scalar offsets") {
    const std::string text = "TGF-\xCE\xB2 in breast cancer";
    const auto annotations = parse_annotator_response(R"([
      {"annotatedClass":{"@id":"http://purl.bioontology.org/ontology/MESH/D001943","prefLabel":"Breast Neoplasms",
        "links":{"ontology":"http://data.bioontology.org/ontologies/MESH"}},
       "annotations":[{"from":10,"to":22,"matchType":"PREF"}]},
      {"annotatedClass":{"@id":"http://purl.obolibrary.org/obo/DOID_1612",
        "links":{"ontology":"http://data.bioontology.org/ontologies/DOID"}},
       "annotations":[{"from":17,"to":22,"score":0.5}]},
      {"annotatedClass":{"@id":"http://x/NCIT_1","links":{"ontology":"http://data.bioontology.org/ontologies/NCIT"}},
       "annotations":[{"from":1,"to":3}]}
    ])",
                                                      text);
    REQUIRE(annotations.size() == 2);
    CHECK(annotations[0].concept_id == "D001943");
    CHECK(annotations[0].span_begin == 9);
    CHECK(annotations[0].span_end == 22);
    CHECK(annotations[0].label == "Breast Neoplasms");
    CHECK(annotations[1].concept_id == "DOID:1612");
    CHECK(annotations[1].source == ConceptSource::Do);
    CHECK(annotations[1].label == "cancer");
    CHECK(annotations[1].score == 0.5);

    CHECK(kind_of([&] { parse_annotator_response("{}", text); }) == ErrorKind::Parse);
    CHECK(kind_of([&] { parse_annotator_response("[", text); }) == ErrorKind::Parse);
    CHECK(kind_of([&] {
              parse_annotator_response(R"([{"annotatedClass":{"@id":"x/D1","links":{"ontology":"o/MESH"}},
                                           "annotations":[{"from":1,"to":99}]}])",
                                       text);
          }) == ErrorKind::Parse);
    CHECK(kind_of([&] { parse_annotator_response(R"([{"annotations":[]}])", text); }) == ErrorKind::Parse);
}

TEST_CASE("pubchem, uniprot, whatizit and esearch parsers") {
    CHECK(parse_pubchem_response(
              R"({"InformationList":{"Information":[{"CID":977,"PubMedID":[3,1,3]},{"CID":5}]}})") ==
          std::vector<std::string>{"3", "1"});
    CHECK(parse_pubchem_response(R"({"Fault":{"Code":"PUGREST.NotFound"}})").empty());
    CHECK(kind_of([] { parse_pubchem_response(R"({"InformationList":{}})"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_pubchem_response(R"({"InformationList":{"Information":[{"PubMedID":["x"]}]}})"); }) ==
          ErrorKind::Parse);

    const char* uniprot = R"(<?xml version="1.0"?><uniprot><entry><reference><citation>
        <dbReference type="PubMed" id="10"/><dbReference type="DOI" id="x"/></citation></reference>
        <reference><citation><dbReference type="PubMed" id="11"/></citation></reference>
        <dbReference type="PubMed" id="99"/></entry></uniprot>)";
    CHECK(parse_uniprot_response(uniprot) == std::vector<std::string>{"10", "11"});
    CHECK(kind_of([] { parse_uniprot_response("<uniprot><entry>"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_uniprot_response("<html/>"); }) == ErrorKind::Parse);

    const char* whatizit = R"(<document xmlns:z="http://www.ebi.ac.uk/z"><text>The <z:uniprot ids="P04637,P04637 INSR_HUMAN">p53
        protein</z:uniprot> and <z:uniprot ids="P38398">BRCA1</z:uniprot>.</text></document>)";
    const auto mentions = parse_whatizit_response(whatizit);
    REQUIRE(mentions.size() == 2);
    CHECK(mentions[0].accession == "P04637");
    CHECK(mentions[0].mention.starts_with("p53"));
    CHECK(mentions[1].mention == "BRCA1");
    CHECK(parse_whatizit_response("<d><e acc='P38398'>x</e></d>", WhatizitSchema{"e", "acc"}).size() == 1);

    CHECK(parse_esearch_response("<eSearchResult><Count>2</Count><IdList><Id>5</Id><Id> 7 </Id><Id>5</Id></IdList>"
                                 "</eSearchResult>") == std::vector<std::string>{"5", "7"});
    CHECK(parse_esearch_response("<eSearchResult><Count>0</Count></eSearchResult>").empty());
    CHECK(kind_of([] { parse_esearch_response("<eSearchResult><IdList><Id>x</Id></IdList></eSearchResult>"); }) ==
          ErrorKind::Parse);
    CHECK(kind_of([] { parse_esearch_response("<ERROR>bad</ERROR>"); }) == ErrorKind::Parse);
}

TEST_CASE("efetch parsing joins sections and drops records without abstracts") {
    const auto docs = parse_efetch_response(kEfetch);
    REQUIRE(docs.size() == 3);
    CHECK(docs[0].pmid == "26580448");
    CHECK(docs[0].title == "Metformin and cancer.");
    CHECK(docs[0].text == "First part. TGF-\xCE\xB2 rises.");
    CHECK(docs[0].pub_date == Date{2015, 11, 18});
    CHECK(docs[1].pmid == "26575237");
    CHECK(docs[1].pub_date == Date{2014, 12, 1});
    CHECK(docs[2].pub_date == Date{2015, 1, 1});
    CHECK(kind_of([] { parse_efetch_response("<PubmedArticleSet><PubmedArticle/></PubmedArticleSet>"); }) ==
          ErrorKind::Parse);
    CHECK(kind_of([] { parse_efetch_response(std::string(kEfetch).substr(0, 300)); }) == ErrorKind::Parse);
}

TEST_CASE("sparql parsing") {
    const auto triples = parse_sparql_response(R"({"head":{"vars":["s","p","o"]},"results":{"bindings":[
        {"s":{"type":"uri","value":"http://id.nlm.nih.gov/mesh/D1"},"p":{"type":"uri","value":"http://p"},
         "o":{"type":"literal","value":"Breast Neoplasms","xml:lang":"en"}},
        {"s":{"type":"bnode","value":"b0"},"p":{"type":"uri","value":"http://p"},"o":{"type":"uri","value":"http://o"}}]}})");
    REQUIRE(triples.size() == 2);
    CHECK(triples[0].object_is_literal);
    CHECK(triples[1].subject == "_:b0");
    CHECK_FALSE(triples[1].object_is_literal);
    CHECK(kind_of([] { parse_sparql_response(R"({"results":{}})"); }) == ErrorKind::Parse);
    CHECK(kind_of([] {
              parse_sparql_response(R"({"results":{"bindings":[{"s":{"type":"literal","value":"x"},
                  "p":{"type":"uri","value":"p"},"o":{"type":"uri","value":"o"}}]}})");
          }) == ErrorKind::Parse);
}

TEST_CASE("gateway clients route through the transport") {
    ScriptedTransport transport;
    GatewayOptions options;
    options.efetch_chunk = 2;
    ServiceGateway gateway(transport, options);

    transport.responses[build_pubchem_url("oxygen")] = {200, "application/json",
                                                        R"({"InformationList":{"Information":[{"PubMedID":[1]}]}})"};
    CHECK(gateway.pubchem_pmids("oxygen") == std::vector<std::string>{"1"});
    CHECK(gateway.pubchem_pmids("unobtainium").empty());  // 404 means no hits
    CHECK(kind_of([&] { gateway.uniprot_pmids("P12345"); }) == ErrorKind::Transport);

    const std::vector<std::string> ids{"26580448", "26577665", "26575237"};
    transport.responses[build_efetch_url(std::span(ids).first(2))] = {200, "text/xml", kEfetch};
    transport.responses[build_efetch_url(std::span(ids).subspan(2))] = {
        200, "text/xml", "<PubmedArticleSet></PubmedArticleSet>"};
    CHECK(gateway.efetch_abstracts(ids).size() == 3);

    transport.log.clear();
    CHECK(kind_of([&] { gateway.whatizit_mentions("p53", "swissprot"); }) == ErrorKind::Transport);
    REQUIRE(transport.log.size() == 1);
    CHECK(transport.log[0].method == HttpMethod::Post);
    CHECK(transport.log[0].body == "p53");
    CHECK(kind_of([&] { gateway.annotate_remote("  ", {}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { gateway.esearch_pmids("x", std::nullopt, SearchDate{2016}); }) ==
          ErrorKind::CutoffViolation);

    const std::string sparql_body = R"({"results":{"bindings":[
        {"s":{"type":"uri","value":"s"},"p":{"type":"uri","value":"p"},"o":{"type":"literal","value":"1"}},
        {"s":{"type":"uri","value":"s"},"p":{"type":"uri","value":"p"},"o":{"type":"literal","value":"2"}}]}})";
    transport.responses[build_sparql_url("http://a", 1)] = {200, "application/json", sparql_body};
    transport.responses[build_sparql_url("http://b", 1)] = {200, "application/json", sparql_body};
    const std::vector<std::string> uris{"http://a", "http://b"};
    const auto triples = gateway.sparql_triples(uris, 1);
    REQUIRE(triples.size() == 2);  // limit enforced per URI
    CHECK(triples[1].object == "1");
}

TEST_CASE("gateway bounds requests in flight") {
    class SlowTransport : public Transport {
    public:
        HttpResponse send(const ServiceRequest&) override {
            const int now = ++active;
            int seen = peak.load();
            while (now > seen && !peak.compare_exchange_weak(seen, now)) {
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
            --active;
            return {200, "application/json", R"({"InformationList":{"Information":[]}})"};
        }
        std::atomic<int> active{0}, peak{0};
    } transport;
    GatewayOptions options;
    options.parallelism = 2;
    ServiceGateway gateway(transport, options);
    std::vector<std::jthread> threads;
    for (int i = 0; i < 8; ++i) threads.emplace_back([&] { gateway.pubchem_pmids("water"); });
    threads.clear();
    CHECK(transport.peak.load() >= 1);
    CHECK(transport.peak.load() <= 2);
}
