#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ws4a/domain.hpp"
#include "ws4a/error.hpp"

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

}  // namespace

TEST_CASE("questions parse with all four types") {
    const auto questions = parse_questions(R"({"questions":[
        {"id":"q1","body":"Is it?","type":"yesno"},
        {"id":"q2","body":"Which?","type":"factoid"},
        {"id":"q3","body":"List them","type":"list"},
        {"id":"q4","body":"Describe","type":"summary"}]})");
    REQUIRE(questions.size() == 4);
    CHECK(questions[0].type == QuestionType::YesNo);
    CHECK(questions[3].type == QuestionType::Summary);
    CHECK(to_string(questions[2].type) == "list");
    CHECK(parse_questions(R"({"questions":[]})").empty());
}

TEST_CASE("malformed question files are parse errors") {
    CHECK(kind_of([] { parse_questions("{"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_questions(R"({"items":[]})"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_questions(R"({"questions":[{"id":"q","body":"b"}]})"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_questions(R"({"questions":[{"id":"q","body":"  ","type":"list"}]})"); }) ==
          ErrorKind::Parse);
    CHECK(kind_of([] { parse_questions(R"({"questions":[{"id":"q","body":"b","type":"essay"}]})"); }) ==
          ErrorKind::Parse);
    CHECK(kind_of([] { load_questions("/nonexistent/questions.json"); }) == ErrorKind::Io);
}

TEST_CASE("question validation") {
    CHECK_NOTHROW(validate(Question{"q", "body", QuestionType::List}));
    CHECK(kind_of([] { validate(Question{"", "body", QuestionType::List}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { validate(Question{"q", "\t", QuestionType::List}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("concept sources and URIs") {
    for (auto source : kAllSources) CHECK(parse_concept_source(to_string(source)) == source);
    CHECK(parse_concept_source("DOID") == ConceptSource::Do);
    CHECK_FALSE(parse_concept_source("mesh"));
    CHECK(is_locally_loaded(ConceptSource::Chebi));
    CHECK_FALSE(is_locally_loaded(ConceptSource::Mesh));
    CHECK(concept_uri(ConceptSource::Chebi, "CHEBI:15377") == "http://purl.obolibrary.org/obo/CHEBI_15377");
    CHECK(concept_uri(ConceptSource::Uniprot, "P04637") == "http://www.uniprot.org/uniprot/P04637");
    CHECK(concept_uri(ConceptSource::Mesh, "D001943").ends_with("term=D001943"));
}

TEST_CASE("annotation validation") {
    ConceptAnnotation a{"D1", "uri", "x", ConceptSource::Mesh, 2, 5, 0.5};
    CHECK_NOTHROW(validate(a, 5));
    CHECK_THROWS_AS(validate(a, 4), Error);
    a.span_end = 2;
    CHECK_THROWS_AS(validate(a, 10), Error);
    a.span_end = 5;
    a.score = 1.5;
    CHECK_THROWS_AS(validate(a, 10), Error);
    a.score = 1.0;
    a.concept_id.clear();
    CHECK_THROWS_AS(validate(a, 10), Error);
}

TEST_CASE("dates are strict and ordered") {
    CHECK(parse_date("2015-11-19") == kDefaultCutoff);
    CHECK(to_string(Date{2016, 2, 29}) == "2016-02-29");
    CHECK(parse_date("2016-02-29").day == 29);
    CHECK(kind_of([] { parse_date("2015-02-29"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_date("2015/11/19"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_date("2015-13-01"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_date("15-11-190"); }) == ErrorKind::Parse);
    CHECK(Date{2015, 11, 19} < Date{2015, 11, 20});
    CHECK(Date{2014, 12, 31} < Date{2015, 1, 1});
}

TEST_CASE("abstract text and pmids") {
    AbstractDoc doc{"123", "Title.", "Body text.", {}};
    CHECK(doc.annotated_text() == "Title. Body text.");
    CHECK(is_pmid("23687640"));
    CHECK_FALSE(is_pmid(""));
    CHECK_FALSE(is_pmid("12a"));
}

TEST_CASE("triples compare as statements") {
    Triple a{"s", "p", "o", false, 1.0};
    Triple b{"s", "p", "o", false, 2.0};
    CHECK(a.same_statement(b));
    b.object_is_literal = true;
    CHECK_FALSE(a.same_statement(b));
}
