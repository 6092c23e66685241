#include "ws4a/eval_harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ws4a/error.hpp"

namespace ws4a {

namespace {

using Interval = std::pair<std::size_t, std::size_t>;

// Characters of [begin, end) covered by the union of `cover`.
std::size_t covered_length(std::size_t begin, std::size_t end, const std::vector<Interval>& cover) {
    std::vector<Interval> clipped;
    for (const auto& [b, e] : cover) {
        const std::size_t lo = std::max(b, begin), hi = std::min(e, end);
        if (lo < hi) clipped.emplace_back(lo, hi);
    }
    std::sort(clipped.begin(), clipped.end());
    std::size_t total = 0, reach = begin;
    for (const auto& [lo, hi] : clipped) {
        const std::size_t from = std::max(lo, reach);
        if (hi > from) {
            total += hi - from;
            reach = hi;
        }
    }
    return total;
}

// Σ over `spans` of their characters covered by `other` in the same document+section.
std::pair<std::size_t, std::size_t> coverage(std::span<const SnippetSpan> spans, std::span<const SnippetSpan> other) {
    std::map<std::pair<std::string, Section>, std::vector<Interval>> index;
    for (const auto& s : other) index[{s.pmid, s.section}].emplace_back(s.begin, s.end);
    std::size_t covered = 0, total = 0;
    for (const auto& s : spans) {
        total += s.end - s.begin;
        auto it = index.find({s.pmid, s.section});
        if (it != index.end()) covered += covered_length(s.begin, s.end, it->second);
    }
    return {covered, total};
}

std::string fixed3(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.3f", value);
    return buffer;
}

std::string time_cell(const std::optional<double>& seconds) {
    if (!seconds) return "-";
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.2f", *seconds);
    return buffer;
}

std::string pad(std::string_view text, std::size_t width) {
    std::string out(text);
    if (out.size() < width) out.append(width - out.size(), ' ');
    return out;
}

std::string render(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (widths.size() <= i) widths.push_back(0);
            widths[i] = std::max(widths[i], row[i].size());
        }
    std::string out;
    for (const auto& row : rows) {
        out += "|";
        for (std::size_t i = 0; i < row.size(); ++i) out += " " + pad(row[i], widths[i]) + " |";
        out += "\n";
    }
    return out;
}

}  // namespace

Prf make_prf(double precision, double recall) {
    const double sum = precision + recall;
    return {precision, recall, sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum};
}

std::string pmid_from_document(std::string_view document) {
    if (is_pmid(document)) return std::string(document);
    const auto slash = document.find_last_of('/');
    const auto marker = document.find("/pubmed/");
    if (slash == std::string_view::npos || marker == std::string_view::npos || marker + 7 != slash ||
        document.find("://") == std::string_view::npos || !is_pmid(document.substr(slash + 1)))
        fail(ErrorKind::MalformedUrl, "not a PubMed document reference: '" + std::string(document) + "'");
    return std::string(document.substr(slash + 1));
}

Prf prf_documents(std::span<const std::string> predicted, std::span<const std::string> gold) {
    std::set<std::string> pred, truth;
    for (const auto& p : predicted) pred.insert(pmid_from_document(p));
    for (const auto& g : gold) truth.insert(pmid_from_document(g));
    std::size_t hits = 0;
    for (const auto& p : pred) hits += truth.count(p);
    const double precision = pred.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(pred.size());
    const double recall = truth.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(truth.size());
    return make_prf(precision, recall);
}

Prf prf_snippets(std::span<const SnippetSpan> predicted, std::span<const SnippetSpan> gold) {
    std::vector<SnippetSpan> pred(predicted.begin(), predicted.end());
    std::sort(pred.begin(), pred.end());
    pred.erase(std::unique(pred.begin(), pred.end()), pred.end());
    const auto [pred_covered, pred_total] = coverage(pred, gold);
    const auto [gold_covered, gold_total] = coverage(gold, pred);
    const double precision = pred_total == 0 ? 0.0 : static_cast<double>(pred_covered) / static_cast<double>(pred_total);
    const double recall = gold_total == 0 ? 0.0 : static_cast<double>(gold_covered) / static_cast<double>(gold_total);
    return make_prf(precision, recall);
}

std::vector<AnswerRecord> parse_answer_records(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::SchemaMismatch, std::string("answer file is not JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("questions") || !doc["questions"].is_array())
        fail(ErrorKind::SchemaMismatch, "answer file needs a 'questions' array");
    std::vector<AnswerRecord> out;
    std::set<std::string> ids;
    try {
        for (const auto& item : doc["questions"]) {
            AnswerRecord record;
            record.id = item.at("id").get<std::string>();
            if (record.id.empty() || !ids.insert(record.id).second)
                fail(ErrorKind::SchemaMismatch, "empty or repeated question id '" + record.id + "'");
            if (item.contains("documents"))
                for (const auto& d : item["documents"]) record.documents.push_back(d.get<std::string>());
            if (item.contains("snippets")) {
                for (const auto& s : item["snippets"]) {
                    const auto begin_section = parse_section(s.at("beginSection").get<std::string>());
                    const auto end_section = parse_section(s.at("endSection").get<std::string>());
                    if (begin_section != end_section)
                        fail(ErrorKind::SchemaMismatch, "snippets spanning two sections are not supported");
                    SnippetSpan span{pmid_from_document(s.at("document").get<std::string>()), begin_section,
                                     s.at("offsetInBeginSection").get<std::size_t>(),
                                     s.at("offsetInEndSection").get<std::size_t>()};
                    if (span.begin >= span.end)
                        fail(ErrorKind::SchemaMismatch, "snippet with an empty or inverted span in " + record.id);
                    record.snippets.push_back(std::move(span));
                }
            }
            out.push_back(std::move(record));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::SchemaMismatch, std::string("answer file: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::MalformedUrl) fail(ErrorKind::SchemaMismatch, e.what());
        throw;
    }
    return out;
}

std::vector<AnswerRecord> load_answer_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_answer_records(buffer.str());
}

QuestionScores batch_means(std::span<const QuestionScores> scores) {
    if (scores.empty()) fail(ErrorKind::InvalidArgument, "batch_means needs at least one question");
    QuestionScores sum;
    for (const auto& s : scores) {
        sum.documents.precision += s.documents.precision;
        sum.documents.recall += s.documents.recall;
        sum.documents.f_measure += s.documents.f_measure;
        sum.snippets.precision += s.snippets.precision;
        sum.snippets.recall += s.snippets.recall;
        sum.snippets.f_measure += s.snippets.f_measure;
    }
    const double n = static_cast<double>(scores.size());
    return {{sum.documents.precision / n, sum.documents.recall / n, sum.documents.f_measure / n},
            {sum.snippets.precision / n, sum.snippets.recall / n, sum.snippets.f_measure / n}};
}

EvalReport evaluate(std::span<const AnswerRecord> answers, std::span<const AnswerRecord> gold) {
    std::map<std::string, const AnswerRecord*> by_id;
    for (const auto& answer : answers) by_id[answer.id] = &answer;
    EvalReport report;
    std::vector<QuestionScores> all;
    for (const auto& truth : gold) {
        const AnswerRecord empty{truth.id, {}, {}};
        auto it = by_id.find(truth.id);
        const AnswerRecord& predicted = it == by_id.end() ? empty : *it->second;
        QuestionScores scores{prf_documents(predicted.documents, truth.documents),
                              prf_snippets(predicted.snippets, truth.snippets)};
        report.per_question[truth.id] = scores;
        all.push_back(scores);
    }
    if (!all.empty()) report.means = batch_means(all);
    return report;
}

std::string format_table(const EvalReport& report, std::string_view batch) {
    std::vector<std::vector<std::string>> rows{
        {"Batch", "", "Mean Precision", "Mean Recall", "Mean FMeasure", "Time (sec)"},
        {std::string(batch), "Docs", fixed3(report.means.documents.precision), fixed3(report.means.documents.recall),
         fixed3(report.means.documents.f_measure), time_cell(report.wall_time_seconds)},
        {"", "Snippets", fixed3(report.means.snippets.precision), fixed3(report.means.snippets.recall),
         fixed3(report.means.snippets.f_measure), ""}};
    return render(rows);
}

std::string format_table(const EvalReport& with_ml, const EvalReport& without_ml, std::string_view batch) {
    const auto& a = with_ml.means;
    const auto& b = without_ml.means;
    std::vector<std::vector<std::string>> rows{
        {"Batch", "", "Mean Precision", "", "Mean Recall", "", "Mean FMeasure", "", "Time (sec)", ""},
        {"", "", "ML", "w/o ML", "ML", "w/o ML", "ML", "w/o ML", "ML", "w/o ML"},
        {std::string(batch), "Docs", fixed3(a.documents.precision), fixed3(b.documents.precision),
         fixed3(a.documents.recall), fixed3(b.documents.recall), fixed3(a.documents.f_measure),
         fixed3(b.documents.f_measure), time_cell(with_ml.wall_time_seconds), time_cell(without_ml.wall_time_seconds)},
        {"", "Snippets", fixed3(a.snippets.precision), fixed3(b.snippets.precision), fixed3(a.snippets.recall),
         fixed3(b.snippets.recall), fixed3(a.snippets.f_measure), fixed3(b.snippets.f_measure), "", ""}};
    return render(rows);
}

std::string report_json(const EvalReport& report) {
    using nlohmann::ordered_json;
    const auto prf = [](const Prf& p) {
        ordered_json j;
        j["precision"] = p.precision;
        j["recall"] = p.recall;
        j["f_measure"] = p.f_measure;
        return j;
    };
    ordered_json doc;
    ordered_json per_question = ordered_json::object();
    for (const auto& [id, scores] : report.per_question) {
        ordered_json q;
        q["documents"] = prf(scores.documents);
        q["snippets"] = prf(scores.snippets);
        per_question[id] = std::move(q);
    }
    doc["per_question"] = std::move(per_question);
    doc["means"]["documents"] = prf(report.means.documents);
    doc["means"]["snippets"] = prf(report.means.snippets);
    doc["wall_time_seconds"] = report.wall_time_seconds ? ordered_json(*report.wall_time_seconds) : ordered_json();
    return doc.dump(2) + "\n";
}

}  // namespace ws4a
