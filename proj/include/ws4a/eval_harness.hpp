#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ws4a/answer.hpp"

namespace ws4a {

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;

    bool operator==(const Prf&) const = default;
};

/// F = 2PR/(P+R), or 0 when P+R = 0.
Prf make_prf(double precision, double recall);

/// PubMed id from either a bare id or a `.../pubmed/<id>` URL.
/// Throws MalformedUrl otherwise.
std::string pmid_from_document(std::string_view document);

/// Set-based P/R/F after deduplicating predictions.
Prf prf_documents(std::span<const std::string> predicted, std::span<const std::string> gold);

struct SnippetSpan {
    std::string pmid;
    Section section = Section::Abstract;
    std::size_t begin = 0;
    std::size_t end = 0;

    auto operator<=>(const SnippetSpan&) const = default;
};

/// Character-overlap P/R/F: predicted characters covered by gold spans of
/// the same document and section over all predicted characters, and the
/// converse for recall. Predictions are deduplicated first.
Prf prf_snippets(std::span<const SnippetSpan> predicted, std::span<const SnippetSpan> gold);

/// One question of an answer or gold file, as far as scoring is concerned.
struct AnswerRecord {
    std::string id;
    std::vector<std::string> documents;
    std::vector<SnippetSpan> snippets;
};

/// Throws SchemaMismatch on anything but the answer-file shape.
std::vector<AnswerRecord> parse_answer_records(std::string_view json_text);
std::vector<AnswerRecord> load_answer_records(const std::filesystem::path& path);

struct QuestionScores {
    Prf documents;
    Prf snippets;
};

struct EvalReport {
    std::map<std::string, QuestionScores> per_question;
    QuestionScores means;
    std::optional<double> wall_time_seconds;
};

/// Unweighted arithmetic means; throws InvalidArgument on an empty batch.
QuestionScores batch_means(std::span<const QuestionScores> scores);

/// Scores every gold question; a question missing from `answers` scores 0.
EvalReport evaluate(std::span<const AnswerRecord> answers, std::span<const AnswerRecord> gold);

/// Docs/Snippets rows by Mean Precision / Recall / FMeasure / Time columns.
/// With two reports the columns split into "ML" and "w/o ML".
std::string format_table(const EvalReport& report, std::string_view batch = "1");
std::string format_table(const EvalReport& with_ml, const EvalReport& without_ml, std::string_view batch = "1");

/// Machine-readable report (per question and means).
std::string report_json(const EvalReport& report);

}  // namespace ws4a
