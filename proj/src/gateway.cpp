#include "ws4a/gateway.hpp"

#include <algorithm>
#include <regex>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <json.hpp>

#include "ws4a/error.hpp"
#include "ws4a/text.hpp"
#include "ws4a/url.hpp"

namespace ws4a {

namespace {

namespace pt = boost::property_tree;
using nlohmann::json;

std::string_view annotator_acronym(ConceptSource source) {
    return source == ConceptSource::Do ? "DOID" : to_string(source);
}

std::string_view trim_slash(std::string_view base) {
    while (!base.empty() && base.back() == '/') base.remove_suffix(1);
    return base;
}

const char* flag(bool value) { return value ? "true" : "false"; }

pt::ptree parse_xml(std::string_view xml, std::string_view what) {
    std::istringstream in{std::string(xml)};
    pt::ptree tree;
    try {
        pt::read_xml(in, tree, pt::xml_parser::no_concat_text);
    } catch (const pt::xml_parser_error& e) {
        fail(ErrorKind::Parse, std::string(what) + " response is not well-formed XML: " + e.what());
    }
    return tree;
}

bool is_meta_key(const std::string& key) {
    return key == "<xmlattr>" || key == "<xmlcomment>" || key == "<xmltext>";
}

std::string inner_text(const pt::ptree& node) {
    std::string out = node.data();
    for (const auto& [key, child] : node) {
        if (key == "<xmltext>") out += child.data();
        else if (!is_meta_key(key)) out += inner_text(child);
    }
    return out;
}

std::string attribute(const pt::ptree& node, const std::string& name) {
    if (auto attrs = node.get_child_optional("<xmlattr>"))
        if (auto value = attrs->get_optional<std::string>(name)) return *value;
    return {};
}

const pt::ptree* child(const pt::ptree& node, const std::string& name) {
    auto it = node.find(name);
    return it == node.not_found() ? nullptr : &it->second;
}

template <typename Fn>
void for_each_child(const pt::ptree& node, const std::string& name, Fn&& fn) {
    for (const auto& [key, value] : node)
        if (key == name) fn(value);
}

template <typename Fn>
void for_each_descendant(const pt::ptree& node, const std::string& name, Fn&& fn) {
    for (const auto& [key, value] : node) {
        if (is_meta_key(key)) continue;
        if (key == name) fn(value);
        for_each_descendant(value, name, fn);
    }
}

const pt::ptree& root_element(const pt::ptree& tree, std::string_view expected, std::string_view what) {
    for (const auto& [key, value] : tree) {
        if (key == "<xmlcomment>") continue;
        if (key != expected)
            fail(ErrorKind::Parse, std::string(what) + " response root is <" + key + ">, expected <" +
                                       std::string(expected) + ">");
        return value;
    }
    fail(ErrorKind::Parse, std::string(what) + " response has no root element");
}

void push_unique(std::vector<std::string>& out, std::set<std::string>& seen, std::string value) {
    if (seen.insert(value).second) out.push_back(std::move(value));
}

std::string local_concept_id(std::string_view uri, ConceptSource source) {
    auto cut = uri.find_last_of("/#");
    std::string id(cut == std::string_view::npos ? uri : uri.substr(cut + 1));
    if (source != ConceptSource::Mesh && source != ConceptSource::Uniprot) {
        if (auto underscore = id.find('_'); underscore != std::string::npos) id[underscore] = ':';
    }
    return id;
}

int month_number(std::string_view text) {
    static constexpr std::string_view kNames[] = {"jan", "feb", "mar", "apr", "may", "jun",
                                                  "jul", "aug", "sep", "oct", "nov", "dec"};
    if (text.empty()) return 1;
    if (std::isdigit(static_cast<unsigned char>(text.front()))) {
        const int value = std::atoi(std::string(text).c_str());
        return value >= 1 && value <= 12 ? value : 1;
    }
    const std::string lower = to_lower(text.substr(0, 3));
    for (int i = 0; i < 12; ++i)
        if (lower == kNames[i]) return i + 1;
    return 1;
}

Date parse_pub_date(const pt::ptree* pub_date) {
    if (!pub_date) fail(ErrorKind::Parse, "PubMed record without PubDate");
    Date date{0, 1, 1};
    if (const auto* year = child(*pub_date, "Year")) {
        date.year = std::atoi(std::string(trim(inner_text(*year))).c_str());
        if (const auto* month = child(*pub_date, "Month")) date.month = month_number(trim(inner_text(*month)));
        if (const auto* day = child(*pub_date, "Day")) {
            const int value = std::atoi(std::string(trim(inner_text(*day))).c_str());
            if (value >= 1 && value <= 31) date.day = value;
        }
    } else if (const auto* medline = child(*pub_date, "MedlineDate")) {
        // e.g. "2015 Nov-Dec" or "2014-2015"
        const std::string text(trim(inner_text(*medline)));
        if (text.size() < 4) fail(ErrorKind::Parse, "unparseable MedlineDate '" + text + "'");
        date.year = std::atoi(text.substr(0, 4).c_str());
        if (text.size() > 5 && text[4] == ' ') date.month = month_number(std::string_view(text).substr(5, 3));
    }
    if (date.year < 1000 || date.year > 9999) fail(ErrorKind::Parse, "PubMed record with an invalid year");
    return date;
}

}  // namespace

// ---------------------------------------------------------------------------
// URL builders

Date SearchDate::latest() const {
    if (month == 0) return {year, 12, 31};
    return {year, month, day == 0 ? 31 : day};
}

std::string SearchDate::format() const {
    char buffer[16];
    if (month == 0) std::snprintf(buffer, sizeof buffer, "%04d", year);
    else std::snprintf(buffer, sizeof buffer, "%04d/%02d/%02d", year, month, day);
    return buffer;
}

std::string build_annotator_url(std::string_view text, const AnnotatorParams& params, std::string_view base) {
    std::vector<std::string> acronyms;
    for (auto source : params.ontologies) acronyms.emplace_back(annotator_acronym(source));
    std::string url(trim_slash(base));
    url += "?text=" + form_encode(text);
    url += "&ontologies=" + join(acronyms, ",");
    url += std::string("&longest_only=") + flag(params.longest_only);
    url += std::string("&exclude_numbers=") + flag(params.exclude_numbers);
    url += std::string("&whole_word_only=") + flag(params.whole_word_only);
    url += std::string("&exclude_synonyms=") + flag(params.exclude_synonyms);
    return url;
}

std::string build_pubchem_url(std::string_view word, std::string_view base) {
    if (word.empty()) fail(ErrorKind::InvalidArgument, "PubChem lookup word is empty");
    return std::string(trim_slash(base)) + "/compound/name/" + percent_encode(word) + "/xrefs/PubMedID/JSON";
}

bool is_uniprot_accession(std::string_view text) {
    static const std::regex kPattern(
        "[OPQ][0-9][A-Z0-9]{3}[0-9]|[A-NR-Z][0-9]([A-Z][A-Z0-9]{2}[0-9]){1,2}");
    return std::regex_match(text.begin(), text.end(), kPattern);
}

std::string build_uniprot_url(std::string_view accession, std::string_view base) {
    if (!is_uniprot_accession(accession))
        fail(ErrorKind::BadAccession, "not a UniProt accession: '" + std::string(accession) + "'");
    return std::string(trim_slash(base)) + "/" + std::string(accession) + ".xml";
}

std::string build_whatizit_url(std::string_view vocabulary, std::string_view base) {
    if (vocabulary.empty()) fail(ErrorKind::InvalidArgument, "Whatizit vocabulary is empty");
    return std::string(trim_slash(base)) + "/" + percent_encode(vocabulary);
}

std::string build_esearch_url(std::string_view term, const std::optional<SearchDate>& mindate,
                              const SearchDate& maxdate, const Date& cutoff, std::string_view base) {
    if (maxdate.latest() > cutoff)
        fail(ErrorKind::CutoffViolation, "esearch maxdate " + maxdate.format() + " is after the corpus cutoff " +
                                             to_string(cutoff));
    std::string url(trim_slash(base));
    url += "/esearch.fcgi?db=pubmed";
    if (mindate) url += "&mindate=" + mindate->format();
    url += "&maxdate=" + maxdate.format();
    url += "&term=" + form_encode(term);
    return url;
}

std::string build_efetch_url(std::span<const std::string> pmids, std::string_view base) {
    if (pmids.empty()) fail(ErrorKind::InvalidArgument, "efetch needs at least one PubMed id");
    std::string url(trim_slash(base));
    url += "/efetch.fcgi?db=pubmed&retmode=xml&id=";
    for (std::size_t i = 0; i < pmids.size(); ++i) {
        if (!is_pmid(pmids[i])) fail(ErrorKind::InvalidArgument, "not a PubMed id: '" + pmids[i] + "'");
        if (i > 0) url += ',';
        url += pmids[i];
    }
    return url;
}

std::string build_document_url(std::string_view pmid, std::string_view base) {
    if (!is_pmid(pmid)) fail(ErrorKind::InvalidArgument, "not a PubMed id: '" + std::string(pmid) + "'");
    return std::string(trim_slash(base)) + "/" + std::string(pmid);
}

std::string build_sparql_query(std::string_view concept_uri, std::size_t limit) {
    const std::string node = "<" + std::string(concept_uri) + ">";
    return "SELECT ?s ?p ?o WHERE { { " + node + " ?p ?o . BIND(" + node + " AS ?s) } UNION { ?s ?p " + node +
           " . BIND(" + node + " AS ?o) } } LIMIT " + std::to_string(limit);
}

std::string build_sparql_url(std::string_view concept_uri, std::size_t limit, std::string_view base) {
    if (limit < 1) fail(ErrorKind::InvalidArgument, "SPARQL limit must be >= 1");
    return std::string(trim_slash(base)) + "?query=" + form_encode(build_sparql_query(concept_uri, limit));
}

// ---------------------------------------------------------------------------
// Parsers

std::vector<ConceptAnnotation> parse_annotator_response(std::string_view payload, std::string_view text) {
    json doc;
    try {
        doc = json::parse(payload);
    } catch (const json::exception& e) {
        fail(ErrorKind::Parse, std::string("annotator response: ") + e.what());
    }
    if (!doc.is_array()) fail(ErrorKind::Parse, "annotator response: expected a JSON array");
    const auto decoded = utf8_decode(text);
    std::vector<ConceptAnnotation> out;
    try {
        for (const auto& item : doc) {
            const auto& cls = item.at("annotatedClass");
            const std::string uri = cls.at("@id").get<std::string>();
            std::string ontology;
            if (cls.contains("links") && cls["links"].contains("ontology"))
                ontology = cls["links"]["ontology"].get<std::string>();
            const auto cut = ontology.find_last_of('/');
            const auto source = parse_concept_source(cut == std::string::npos ? ontology : ontology.substr(cut + 1));
            if (!source) continue;
            const std::string id = local_concept_id(uri, *source);
            for (const auto& hit : item.at("annotations")) {
                const long from = hit.at("from").get<long>();
                const long to = hit.at("to").get<long>();
                if (from < 1 || to < from || static_cast<std::size_t>(to) > decoded.size())
                    fail(ErrorKind::Parse, "annotator response: span [" + std::to_string(from) + "," +
                                               std::to_string(to) + "] does not fit the annotated text");
                ConceptAnnotation annotation;
                annotation.concept_id = id;
                annotation.concept_uri = concept_uri(*source, id);
                annotation.source = *source;
                annotation.span_begin = static_cast<std::size_t>(from - 1);
                annotation.span_end = static_cast<std::size_t>(to);
                annotation.label = cls.contains("prefLabel")
                                       ? cls["prefLabel"].get<std::string>()
                                       : utf8_encode(std::u32string_view(decoded).substr(
                                             annotation.span_begin, annotation.span_end - annotation.span_begin));
                annotation.score = hit.contains("score") ? hit["score"].get<double>() : 1.0;
                if (!(annotation.score >= 0.0 && annotation.score <= 1.0))
                    fail(ErrorKind::Parse, "annotator response: score outside [0,1]");
                out.push_back(std::move(annotation));
            }
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::Parse, std::string("annotator response: ") + e.what());
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(a.source, a.span_begin, a.span_end, a.concept_id) <
               std::tie(b.source, b.span_begin, b.span_end, b.concept_id);
    });
    return out;
}

std::vector<std::string> parse_pubchem_response(std::string_view payload) {
    json doc;
    try {
        doc = json::parse(payload);
    } catch (const json::exception& e) {
        fail(ErrorKind::Parse, std::string("PubChem response: ") + e.what());
    }
    if (doc.is_object() && doc.contains("Fault")) return {};
    std::vector<std::string> out;
    std::set<std::string> seen;
    try {
        for (const auto& info : doc.at("InformationList").at("Information")) {
            if (!info.contains("PubMedID")) continue;
            for (const auto& id : info["PubMedID"]) {
                std::string pmid = id.is_number_unsigned() ? std::to_string(id.get<std::uint64_t>())
                                                           : id.get<std::string>();
                if (!is_pmid(pmid)) fail(ErrorKind::Parse, "PubChem response: bad PubMed id '" + pmid + "'");
                push_unique(out, seen, std::move(pmid));
            }
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::Parse, std::string("PubChem response: ") + e.what());
    }
    return out;
}

std::vector<std::string> parse_uniprot_response(std::string_view xml) {
    const auto tree = parse_xml(xml, "UniProt");
    const auto& root = root_element(tree, "uniprot", "UniProt");
    std::vector<std::string> out;
    std::set<std::string> seen;
    for_each_descendant(root, "citation", [&](const pt::ptree& citation) {
        for_each_child(citation, "dbReference", [&](const pt::ptree& ref) {
            if (attribute(ref, "type") != "PubMed") return;
            std::string id = attribute(ref, "id");
            if (!is_pmid(id)) fail(ErrorKind::Parse, "UniProt response: bad PubMed id '" + id + "'");
            push_unique(out, seen, std::move(id));
        });
    });
    return out;
}

std::vector<WhatizitMention> parse_whatizit_response(std::string_view xml, const WhatizitSchema& schema) {
    const auto tree = parse_xml(xml, "Whatizit");
    std::vector<WhatizitMention> out;
    std::set<std::string> seen;
    for_each_descendant(tree, schema.tag, [&](const pt::ptree& element) {
        std::string ids = attribute(element, schema.id_attribute);
        std::replace(ids.begin(), ids.end(), ',', ' ');
        std::istringstream in(ids);
        std::string accession;
        const std::string mention(trim(inner_text(element)));
        while (in >> accession) {
            if (!is_uniprot_accession(accession) || !seen.insert(accession).second) continue;
            out.push_back({accession, mention});
        }
    });
    return out;
}

std::vector<std::string> parse_esearch_response(std::string_view xml) {
    const auto tree = parse_xml(xml, "esearch");
    const auto& root = root_element(tree, "eSearchResult", "esearch");
    std::vector<std::string> out;
    std::set<std::string> seen;
    if (const auto* ids = child(root, "IdList")) {
        for_each_child(*ids, "Id", [&](const pt::ptree& id) {
            std::string pmid(trim(inner_text(id)));
            if (!is_pmid(pmid)) fail(ErrorKind::Parse, "esearch response: bad PubMed id '" + pmid + "'");
            push_unique(out, seen, std::move(pmid));
        });
    }
    return out;
}

std::vector<AbstractDoc> parse_efetch_response(std::string_view xml) {
    const auto tree = parse_xml(xml, "efetch");
    const auto& root = root_element(tree, "PubmedArticleSet", "efetch");
    std::vector<AbstractDoc> out;
    for_each_child(root, "PubmedArticle", [&](const pt::ptree& article_node) {
        const auto* citation = child(article_node, "MedlineCitation");
        if (!citation) fail(ErrorKind::Parse, "efetch response: PubmedArticle without MedlineCitation");
        const auto* pmid = child(*citation, "PMID");
        const auto* article = child(*citation, "Article");
        if (!pmid || !article) fail(ErrorKind::Parse, "efetch response: record without PMID or Article");
        AbstractDoc doc;
        doc.pmid = std::string(trim(inner_text(*pmid)));
        if (!is_pmid(doc.pmid)) fail(ErrorKind::Parse, "efetch response: bad PMID '" + doc.pmid + "'");
        if (const auto* title = child(*article, "ArticleTitle")) doc.title = std::string(trim(inner_text(*title)));
        std::vector<std::string> parts;
        if (const auto* abstract = child(*article, "Abstract")) {
            for_each_child(*abstract, "AbstractText", [&](const pt::ptree& part) {
                const std::string text(trim(inner_text(part)));
                if (!text.empty()) parts.push_back(text);
            });
        }
        if (parts.empty()) return;
        doc.text = join(parts, " ");
        const auto* journal = child(*article, "Journal");
        const auto* issue = journal ? child(*journal, "JournalIssue") : nullptr;
        doc.pub_date = parse_pub_date(issue ? child(*issue, "PubDate") : nullptr);
        out.push_back(std::move(doc));
    });
    return out;
}

std::vector<Triple> parse_sparql_response(std::string_view payload) {
    json doc;
    try {
        doc = json::parse(payload);
    } catch (const json::exception& e) {
        fail(ErrorKind::Parse, std::string("SPARQL response: ") + e.what());
    }
    std::vector<Triple> out;
    try {
        for (const auto& binding : doc.at("results").at("bindings")) {
            const auto term = [&](const char* var) {
                const auto& value = binding.at(var);
                const std::string type = value.at("type").get<std::string>();
                std::string text = value.at("value").get<std::string>();
                if (type == "bnode") text = "_:" + text;
                return std::pair{text, type == "literal" || type == "typed-literal"};
            };
            auto [s, s_literal] = term("s");
            auto [p, p_literal] = term("p");
            auto [o, o_literal] = term("o");
            if (s_literal || p_literal) fail(ErrorKind::Parse, "SPARQL response: literal in subject or predicate");
            out.push_back({std::move(s), std::move(p), std::move(o), o_literal, 0.0});
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::Parse, std::string("SPARQL response: ") + e.what());
    }
    return out;
}

// ---------------------------------------------------------------------------
// ServiceGateway

ServiceGateway::ServiceGateway(Transport& transport, GatewayOptions options)
    : transport_(transport), options_(std::move(options)), in_flight_(std::max<std::ptrdiff_t>(1, options_.parallelism)) {
    if (options_.efetch_chunk < 1) fail(ErrorKind::Config, "efetch chunk size must be >= 1");
}

HttpResponse ServiceGateway::fetch(const ServiceRequest& request) {
    validate(request);
    in_flight_.acquire();
    struct Release {
        std::counting_semaphore<>& semaphore;
        ~Release() { semaphore.release(); }
    } release{in_flight_};
    return transport_.send(request);
}

namespace {

void require_ok(const HttpResponse& response, const ServiceRequest& request) {
    if (response.status < 200 || response.status >= 300)
        fail(ErrorKind::Transport, std::string(to_string(request.service)) + " returned HTTP " +
                                       std::to_string(response.status) + ": " + request.url);
}

}  // namespace

std::vector<ConceptAnnotation> ServiceGateway::annotate_remote(std::string_view text, const AnnotatorParams& params) {
    if (trim(text).empty()) fail(ErrorKind::InvalidArgument, "annotator input text is empty");
    ServiceRequest request{HttpMethod::Get, build_annotator_url(text, params, options_.endpoints.annotator),
                           std::nullopt, Service::Annotator, {{"Accept", "application/json"}}};
    const auto response = fetch(request);
    require_ok(response, request);
    return parse_annotator_response(response.body, text);
}

std::vector<std::string> ServiceGateway::pubchem_pmids(std::string_view word) {
    ServiceRequest request{HttpMethod::Get, build_pubchem_url(word, options_.endpoints.pubchem), std::nullopt,
                           Service::Pubchem, {}};
    const auto response = fetch(request);
    if (response.status == 404) return {};
    require_ok(response, request);
    return parse_pubchem_response(response.body);
}

std::vector<std::string> ServiceGateway::uniprot_pmids(std::string_view accession) {
    ServiceRequest request{HttpMethod::Get, build_uniprot_url(accession, options_.endpoints.uniprot),
                           std::nullopt, Service::Uniprot, {}};
    const auto response = fetch(request);
    require_ok(response, request);
    return parse_uniprot_response(response.body);
}

std::vector<WhatizitMention> ServiceGateway::whatizit_mentions(std::string_view text, std::string_view vocabulary) {
    if (trim(text).empty()) fail(ErrorKind::InvalidArgument, "Whatizit input text is empty");
    ServiceRequest request{HttpMethod::Post, build_whatizit_url(vocabulary, options_.endpoints.whatizit),
                           std::string(text), Service::Whatizit, {}};
    const auto response = fetch(request);
    require_ok(response, request);
    return parse_whatizit_response(response.body, options_.whatizit);
}

std::vector<std::string> ServiceGateway::whatizit_accessions(std::string_view text, std::string_view vocabulary) {
    std::vector<std::string> out;
    for (auto& mention : whatizit_mentions(text, vocabulary)) out.push_back(std::move(mention.accession));
    return out;
}

std::vector<std::string> ServiceGateway::esearch_pmids(std::string_view term, const std::optional<SearchDate>& mindate,
                                                       const SearchDate& maxdate) {
    ServiceRequest request{HttpMethod::Get,
                           build_esearch_url(term, mindate, maxdate, options_.cutoff, options_.endpoints.eutils),
                           std::nullopt, Service::EutilsSearch, {}};
    const auto response = fetch(request);
    require_ok(response, request);
    return parse_esearch_response(response.body);
}

std::vector<AbstractDoc> ServiceGateway::efetch_abstracts(std::span<const std::string> pmids) {
    if (pmids.empty()) fail(ErrorKind::InvalidArgument, "efetch_abstracts needs at least one PubMed id");
    std::vector<AbstractDoc> out;
    for (std::size_t start = 0; start < pmids.size(); start += options_.efetch_chunk) {
        const auto chunk = pmids.subspan(start, std::min(options_.efetch_chunk, pmids.size() - start));
        ServiceRequest request{HttpMethod::Get, build_efetch_url(chunk, options_.endpoints.eutils), std::nullopt,
                               Service::EutilsFetch, {}};
        const auto response = fetch(request);
        require_ok(response, request);
        for (auto& doc : parse_efetch_response(response.body)) out.push_back(std::move(doc));
    }
    return out;
}

std::vector<Triple> ServiceGateway::sparql_triples(std::span<const std::string> concept_uris, std::size_t limit) {
    if (limit < 1) fail(ErrorKind::InvalidArgument, "SPARQL limit must be >= 1");
    std::vector<Triple> out;
    for (const auto& uri : concept_uris) {
        ServiceRequest request{HttpMethod::Get, build_sparql_url(uri, limit, options_.endpoints.sparql), std::nullopt,
                               Service::Sparql, {{"Accept", "application/sparql-results+json"}}};
        const auto response = fetch(request);
        require_ok(response, request);
        auto triples = parse_sparql_response(response.body);
        if (triples.size() > limit) triples.resize(limit);
        for (auto& triple : triples) out.push_back(std::move(triple));
    }
    return out;
}

}  // namespace ws4a
