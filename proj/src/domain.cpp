#include "ws4a/domain.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ws4a/error.hpp"
#include "ws4a/text.hpp"

namespace ws4a {

std::string_view to_string(QuestionType type) {
    switch (type) {
        case QuestionType::YesNo: return "yesno";
        case QuestionType::Factoid: return "factoid";
        case QuestionType::List: return "list";
        case QuestionType::Summary: return "summary";
    }
    return "summary";
}

QuestionType parse_question_type(std::string_view text) {
    if (text == "yesno") return QuestionType::YesNo;
    if (text == "factoid") return QuestionType::Factoid;
    if (text == "list") return QuestionType::List;
    if (text == "summary") return QuestionType::Summary;
    fail(ErrorKind::Parse, "unknown question type '" + std::string(text) + "'");
}

void validate(const Question& question) {
    if (question.id.empty()) fail(ErrorKind::InvalidArgument, "question id is empty");
    if (trim(question.body).empty())
        fail(ErrorKind::InvalidArgument, "question " + question.id + " has an empty body");
}

std::vector<Question> parse_questions(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, std::string("questions file: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("questions") || !doc["questions"].is_array())
        fail(ErrorKind::Parse, "questions file: expected an object with a 'questions' array");
    std::vector<Question> out;
    for (const auto& item : doc["questions"]) {
        if (!item.is_object() || !item.contains("id") || !item.contains("body") ||
            !item.contains("type") || !item["id"].is_string() || !item["body"].is_string() ||
            !item["type"].is_string())
            fail(ErrorKind::Parse, "questions file: each question needs string id, body and type");
        Question q{item["id"].get<std::string>(), item["body"].get<std::string>(),
                   parse_question_type(item["type"].get<std::string>())};
        try {
            validate(q);
        } catch (const Error& e) {
            fail(ErrorKind::Parse, std::string("questions file: ") + e.what());
        }
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<Question> load_questions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_questions(buffer.str());
}

std::string_view to_string(ConceptSource source) {
    switch (source) {
        case ConceptSource::Mesh: return "MESH";
        case ConceptSource::Go: return "GO";
        case ConceptSource::Uniprot: return "UNIPROT";
        case ConceptSource::Jochem: return "JOCHEM";
        case ConceptSource::Do: return "DO";
        case ConceptSource::Chebi: return "CHEBI";
    }
    return "MESH";
}

std::optional<ConceptSource> parse_concept_source(std::string_view text) {
    for (auto source : kAllSources)
        if (text == to_string(source)) return source;
    if (text == "DOID") return ConceptSource::Do;
    return std::nullopt;
}

std::string concept_uri(ConceptSource source, std::string_view concept_id) {
    const std::string id(concept_id);
    switch (source) {
        case ConceptSource::Mesh:
            return "http://www.nlm.nih.gov/cgi/mesh/2016/MB_cgi?field=uid&exact=true&term=" + id;
        case ConceptSource::Go:
            return "http://amigo.geneontology.org/cgi-bin/amigo/term_details?term=" + id;
        case ConceptSource::Uniprot:
            return "http://www.uniprot.org/uniprot/" + id;
        case ConceptSource::Jochem:
            return "http://www.biosemantics.org/jochem#" + id;
        case ConceptSource::Do:
            return "http://www.disease-ontology.org/api/metadata/" + id;
        case ConceptSource::Chebi: {
            std::string local = id;
            if (auto colon = local.find(':'); colon != std::string::npos) local[colon] = '_';
            return "http://purl.obolibrary.org/obo/" + local;
        }
    }
    return id;
}

void validate(const ConceptAnnotation& annotation, std::size_t text_length) {
    if (annotation.concept_id.empty())
        fail(ErrorKind::InvalidArgument, "annotation has an empty concept id");
    if (annotation.span_begin >= annotation.span_end || annotation.span_end > text_length)
        fail(ErrorKind::InvalidArgument,
             "annotation " + annotation.concept_id + " span [" +
                 std::to_string(annotation.span_begin) + "," + std::to_string(annotation.span_end) +
                 ") is outside a text of length " + std::to_string(text_length));
    if (!(annotation.score >= 0.0 && annotation.score <= 1.0))
        fail(ErrorKind::InvalidArgument, "annotation " + annotation.concept_id + " score outside [0,1]");
}

namespace {

int parse_int(std::string_view text) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        fail(ErrorKind::Parse, "not an integer: '" + std::string(text) + "'");
    return value;
}

constexpr bool is_leap(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

int days_in_month(int year, int month) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return month == 2 && is_leap(year) ? 29 : kDays[month - 1];
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        fail(ErrorKind::Parse, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
    Date date{parse_int(text.substr(0, 4)), parse_int(text.substr(5, 2)), parse_int(text.substr(8, 2))};
    if (date.month < 1 || date.month > 12 || date.day < 1 || date.day > days_in_month(date.year, date.month))
        fail(ErrorKind::Parse, "invalid calendar date '" + std::string(text) + "'");
    return date;
}

std::string to_string(const Date& date) {
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "%04d-%02d-%02d", date.year, date.month, date.day);
    return buffer;
}

std::string AbstractDoc::annotated_text() const { return title + " " + text; }

bool is_pmid(std::string_view text) {
    if (text.empty()) return false;
    for (char c : text)
        if (c < '0' || c > '9') return false;
    return true;
}

}  // namespace ws4a
