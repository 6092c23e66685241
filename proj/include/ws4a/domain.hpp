#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ws4a {

enum class QuestionType { YesNo, Factoid, List, Summary };

std::string_view to_string(QuestionType type);
QuestionType parse_question_type(std::string_view text);

struct Question {
    std::string id;
    std::string body;
    QuestionType type = QuestionType::Summary;
};

/// Throws InvalidArgument if the id or trimmed body is empty.
void validate(const Question& question);

/// `{"questions":[{"id":..., "body":..., "type":...}]}`
std::vector<Question> parse_questions(std::string_view json_text);
std::vector<Question> load_questions(const std::filesystem::path& path);

enum class ConceptSource { Mesh, Go, Uniprot, Jochem, Do, Chebi };

inline constexpr ConceptSource kAllSources[] = {ConceptSource::Mesh,   ConceptSource::Go,
                                                ConceptSource::Uniprot, ConceptSource::Jochem,
                                                ConceptSource::Do,     ConceptSource::Chebi};

std::string_view to_string(ConceptSource source);
/// Accepts the canonical names plus the BioPortal acronym DOID.
std::optional<ConceptSource> parse_concept_source(std::string_view text);
/// ChEBI is only ever loaded from a local file; it has no remote annotator.
constexpr bool is_locally_loaded(ConceptSource source) { return source == ConceptSource::Chebi; }

/// Canonical concept URI emitted in answers.
std::string concept_uri(ConceptSource source, std::string_view concept_id);

struct ConceptAnnotation {
    std::string concept_id;
    std::string concept_uri;
    std::string label;
    ConceptSource source = ConceptSource::Mesh;
    std::size_t span_begin = 0;
    std::size_t span_end = 0;
    double score = 1.0;

    bool operator==(const ConceptAnnotation&) const = default;
};

/// Throws InvalidArgument unless the span lies in [0, text_length] and is
/// non-empty, the id is non-empty, and the score is in [0,1].
void validate(const ConceptAnnotation& annotation, std::size_t text_length);

struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;
};

/// Strict "YYYY-MM-DD".
Date parse_date(std::string_view text);
std::string to_string(const Date& date);

inline constexpr Date kDefaultCutoff{2015, 11, 19};

struct AbstractDoc {
    std::string pmid;
    std::string title;
    std::string text;
    Date pub_date;

    /// Title and abstract joined by one space; the text that gets annotated.
    std::string annotated_text() const;
};

bool is_pmid(std::string_view text);

}  // namespace ws4a

namespace ws4a {

/// RDF statement; the object is a URI unless `object_is_literal`.
struct Triple {
    std::string subject;
    std::string predicate;
    std::string object;
    bool object_is_literal = false;
    double score = 0.0;

    bool same_statement(const Triple& other) const {
        return subject == other.subject && predicate == other.predicate && object == other.object &&
               object_is_literal == other.object_is_literal;
    }
};

}  // namespace ws4a
