#include "ws4a/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ws4a/text.hpp"

namespace ws4a {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. The exception of
// the lowest failing index is rethrown once all workers are done.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> threads;
        for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(work);
    }
    for (const auto& error : errors)
        if (error) std::rethrow_exception(error);
}

void log_line(const RunContext& context, const std::string& line) {
    if (context.log) *context.log << line << '\n';
}

std::string format_seconds(double seconds) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.3f", seconds);
    return buffer;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    out << text;
    if (!out.flush()) fail(ErrorKind::Io, "short write to " + path.string());
}

std::vector<std::string> merged_failures(const QuestionResult& result) {
    std::vector<std::string> out;
    for (const auto& f : result.failures) out.push_back(result.question.id + ": " + f);
    return out;
}

}  // namespace

KnowledgeBase load_knowledge(const PipelineConfig& config) {
    std::vector<OntologyGraph> graphs;
    for (const auto& file : config.ontologies) {
        if (!fs::exists(file.path)) fail(ErrorKind::Config, "ontology file not found: " + file.path.string());
        graphs.push_back(load_ontology(file.path, format_for_path(file.path), file.default_source));
    }
    KnowledgeBase knowledge;
    knowledge.graph = OntologyGraph::merge(graphs);
    knowledge.local = ConceptDictionary(knowledge.graph, ConceptSource::Chebi);
    knowledge.all = ConceptDictionary(knowledge.graph);
    return knowledge;
}

TransportStack::TransportStack(const PipelineConfig& config, Transport* network, bool verify,
                               RecordingTransport::Clock clock)
    : mode_(config.mode) {
    if (verify) mode_ = GatewayMode::Replay;
    const auto live = [&]() -> Transport& {
        if (network) return *network;
        owned_network_ = std::make_unique<HttpTransport>(config.http);
        return *owned_network_;
    };
    switch (mode_) {
        case GatewayMode::Replay: {
            if (!fs::is_directory(config.store))
                fail(ErrorKind::Config, "replay mode needs a fixture store at " + config.store.string());
            store_ = std::make_unique<FixtureStore>(config.store);
            replay_ = ReplayTransport::from_store(*store_);
            if (verify) {
                auto verifying = std::make_unique<VerifyingTransport>(*replay_);
                verifier_ = verifying.get();
                front_ = std::move(verifying);
                active_ = front_.get();
            } else {
                active_ = replay_.get();
            }
            break;
        }
        case GatewayMode::Record: {
            fs::create_directories(config.store);
            store_ = std::make_unique<FixtureStore>(config.store);
            front_ = std::make_unique<RecordingTransport>(live(), *store_, std::move(clock));
            active_ = front_.get();
            break;
        }
        case GatewayMode::Passthrough:
            active_ = &live();
            break;
    }
}

Pipeline::Pipeline(const PipelineConfig& config, Transport& transport)
    : config_(config),
      knowledge_(load_knowledge(config)),
      gateway_(std::make_unique<ServiceGateway>(transport, config.gateway)),
      engine_(gateway_.get(), &knowledge_.local, config.annotation),
      retriever_(*gateway_, config.retriever),
      evaluator_(knowledge_.graph, knowledge_.all, config.evaluator) {
    config_.validate();
}

AnnotationSet Pipeline::annotate(const Question& question) const { return engine_.annotate_question(question); }

CandidatePool Pipeline::retrieve(const Question& question, const AnnotationSet& query) const {
    return retriever_.build_pool(question, query);
}

QuestionResult Pipeline::assess(const Question& question) const {
    QuestionResult result;
    result.question = question;
    result.query = annotate(question);
    result.pool = retrieve(question, result.query);
    for (const auto& doc : result.pool.docs) {
        auto annotations = engine_.annotate_abstract(doc);
        auto graded = evaluator_.evaluate(question, result.query, doc, annotations);
        graded.approved = false;
        if (annotations.degraded)
            for (const auto& f : annotations.failures) result.failures.push_back("abstract " + doc.pmid + ": " + f);
        result.degraded = result.degraded || annotations.degraded;
        result.graded.push_back(std::move(graded));
        result.abstract_annotations.push_back(std::move(annotations));
    }
    result.degraded = result.degraded || result.query.degraded || result.pool.degraded;
    for (const auto& f : result.query.failures) result.failures.push_back("question: " + f);
    for (const auto& f : result.pool.failures) result.failures.push_back("retrieval: " + f);
    return result;
}

QuestionResult Pipeline::answer(const Question& question, const SvmModel* model) const {
    const auto start = Clock::now();
    try {
        QuestionResult result = assess(question);
        std::vector<GradedAbstract> approved;
        std::vector<AnnotationSet> approved_annotations;
        for (std::size_t i = 0; i < result.graded.size(); ++i) {
            auto& graded = result.graded[i];
            if (model) {
                const auto features = extract_features(graded.doc, graded.scores, model->vocabulary);
                graded.approved = predict(*model, features).label == 1;
            } else {
                graded.approved = ws4a::grade(graded.scores, config_.evaluator.weights, config_.evaluator.threshold).approved;
            }
            if (graded.approved) {
                approved.push_back(graded);
                approved_annotations.push_back(result.abstract_annotations[i]);
            }
        }

        auto snippets = select_snippets(question, approved, knowledge_.all, config_.caps.snippets);
        const auto selection = select_concepts(result.query, approved_annotations, knowledge_.graph, config_.caps.concepts);
        std::vector<std::string> concepts;
        for (const auto& c : selection.output) concepts.push_back(c.concept_uri);
        auto triples = build_triples(selection.triple_seeds, *gateway_, config_.triples, config_.caps.triples);
        if (triples.degraded) {
            result.degraded = true;
            for (const auto& f : triples.failures) result.failures.push_back("triples: " + f);
        }
        result.answer = emit_answer(question, approved, std::move(snippets), std::move(concepts),
                                    std::move(triples.triples), config_.caps, config_.gateway.endpoints.pubmed);
        result.seconds = seconds_since(start);
        return result;
    } catch (const Error& e) {
        fail(e.kind(), "question " + question.id + ": " + e.what());
    }
}

std::vector<QuestionResult> Pipeline::answer_all(std::span<const Question> questions, const SvmModel* model) const {
    std::vector<QuestionResult> results(questions.size());
    parallel_for(questions.size(), config_.question_concurrency,
                 [&](std::size_t i) { results[i] = answer(questions[i], model); });
    return results;
}

AnswerRun cmd_answer(const fs::path& questions_file, const PipelineConfig& config,
                     const std::optional<fs::path>& model_file, const RunContext& context) {
    const auto start = Clock::now();
    const auto questions = load_questions(questions_file);
    std::optional<SvmModel> model;
    if (model_file) model = load_model(*model_file);
    TransportStack stack(config, context.network, false, context.clock);
    const Pipeline pipeline(config, stack.transport());

    AnswerRun run;
    run.results = pipeline.answer_all(questions, model ? &*model : nullptr);
    std::vector<AnswerSet> answers;
    for (const auto& result : run.results) {
        answers.push_back(result.answer);
        std::string line = "question " + result.question.id + ": " + format_seconds(result.seconds) + " s";
        if (result.degraded) line += " (degraded: " + std::to_string(result.failures.size()) + " failures)";
        log_line(context, line);
    }
    run.json = serialize_answers(answers, config.gateway.endpoints.pubmed);
    run.total_seconds = seconds_since(start);
    log_line(context, "total: " + format_seconds(run.total_seconds) + " s for " + std::to_string(questions.size()) +
                          " questions");
    return run;
}

fs::path timing_path(const fs::path& answer_file) {
    fs::path out = answer_file;
    out.replace_extension(".timing.json");
    return out;
}

void write_answer_run(const AnswerRun& run, const fs::path& answer_file) {
    write_text(answer_file, run.json);
    nlohmann::ordered_json timing;
    timing["total_seconds"] = run.total_seconds;
    nlohmann::ordered_json per_question = nlohmann::ordered_json::object();
    for (const auto& result : run.results) per_question[result.question.id] = result.seconds;
    timing["per_question"] = std::move(per_question);
    write_text(timing_path(answer_file), timing.dump(2) + "\n");
}

std::optional<double> read_total_seconds(const fs::path& answer_file) {
    std::ifstream in(timing_path(answer_file), std::ios::binary);
    if (!in) return std::nullopt;
    try {
        const auto doc = nlohmann::json::parse(in);
        return doc.at("total_seconds").get<double>();
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

std::string cmd_annotate(const fs::path& questions_file, const PipelineConfig& config, const RunContext& context) {
    const auto questions = load_questions(questions_file);
    TransportStack stack(config, context.network, false, context.clock);
    const Pipeline pipeline(config, stack.transport());
    std::vector<AnnotationSet> sets(questions.size());
    parallel_for(questions.size(), config.question_concurrency,
                 [&](std::size_t i) { sets[i] = pipeline.annotate(questions[i]); });

    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < questions.size(); ++i) {
        nlohmann::ordered_json q;
        q["id"] = questions[i].id;
        q["degraded"] = sets[i].degraded;
        nlohmann::ordered_json annotations = nlohmann::ordered_json::array();
        for (const auto& a : sets[i].annotations) {
            nlohmann::ordered_json item;
            item["concept_id"] = a.concept_id;
            item["source"] = to_string(a.source);
            item["uri"] = a.concept_uri;
            item["label"] = a.label;
            item["begin"] = a.span_begin;
            item["end"] = a.span_end;
            item["score"] = a.score;
            annotations.push_back(std::move(item));
        }
        q["annotations"] = std::move(annotations);
        q["failures"] = sets[i].failures;
        out.push_back(std::move(q));
    }
    return out.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

std::string cmd_retrieve(const fs::path& questions_file, const PipelineConfig& config, const RunContext& context) {
    const auto questions = load_questions(questions_file);
    TransportStack stack(config, context.network, false, context.clock);
    const Pipeline pipeline(config, stack.transport());
    std::vector<CandidatePool> pools(questions.size());
    parallel_for(questions.size(), config.question_concurrency,
                 [&](std::size_t i) { pools[i] = pipeline.retrieve(questions[i], pipeline.annotate(questions[i])); });

    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < questions.size(); ++i) {
        nlohmann::ordered_json q;
        q["id"] = questions[i].id;
        q["degraded"] = pools[i].degraded;
        nlohmann::ordered_json docs = nlohmann::ordered_json::array();
        for (const auto& doc : pools[i].docs) {
            nlohmann::ordered_json item;
            item["pmid"] = doc.pmid;
            item["pub_date"] = to_string(doc.pub_date);
            item["title"] = doc.title;
            std::vector<std::string> sources;
            if (auto it = pools[i].pmid_provenance.find(doc.pmid); it != pools[i].pmid_provenance.end())
                for (auto source : it->second) sources.emplace_back(to_string(source));
            item["sources"] = sources;
            docs.push_back(std::move(item));
        }
        q["documents"] = std::move(docs);
        q["failures"] = pools[i].failures;
        out.push_back(std::move(q));
    }
    return out.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

TrainSummary cmd_train(const fs::path& questions_file, const fs::path& gold_file, const PipelineConfig& config,
                       const fs::path& model_out, const RunContext& context) {
    const auto questions = load_questions(questions_file);
    std::map<std::string, std::set<std::string>> gold;
    for (const auto& record : load_answer_records(gold_file)) {
        auto& pmids = gold[record.id];
        for (const auto& d : record.documents) pmids.insert(pmid_from_document(d));
    }
    for (const auto& q : questions)
        if (!gold.count(q.id)) fail(ErrorKind::SchemaMismatch, "gold file has no entry for question " + q.id);

    TransportStack stack(config, context.network, false, context.clock);
    const Pipeline pipeline(config, stack.transport());
    std::vector<QuestionResult> assessed(questions.size());
    parallel_for(questions.size(), config.question_concurrency, [&](std::size_t i) {
        try {
            assessed[i] = pipeline.assess(questions[i]);
        } catch (const Error& e) {
            fail(e.kind(), "question " + questions[i].id + ": " + e.what());
        }
    });

    std::vector<const GradedAbstract*> candidates;
    std::vector<int> labels;
    for (const auto& result : assessed) {
        for (const auto& graded : result.graded) {
            candidates.push_back(&graded);
            labels.push_back(label_from_gold(graded.doc, gold[result.question.id]));
        }
    }
    TrainSummary summary;
    summary.examples = candidates.size();
    summary.positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    if (summary.positives == 0 || summary.positives == summary.examples)
        fail(ErrorKind::DegenerateLabels, "gold labels give a single class over " + std::to_string(summary.examples) +
                                              " candidate abstracts");

    const auto [train_idx, holdout_idx] =
        split_holdout(candidates.size(), config.classifier.holdout_fraction, config.classifier.svm.seed);
    std::vector<AbstractDoc> corpus;
    for (auto i : train_idx) corpus.push_back(candidates[i]->doc);
    const auto vocabulary = build_vocabulary(corpus, config.classifier.n_max, config.classifier.vocabulary_cap);

    const auto example = [&](std::size_t i) {
        return LabeledExample{extract_features(candidates[i]->doc, candidates[i]->scores, vocabulary), labels[i]};
    };
    std::vector<LabeledExample> training;
    for (auto i : train_idx) training.push_back(example(i));
    summary.model = train(training, config.classifier.svm, vocabulary);
    summary.holdout = holdout_idx.size();
    if (!holdout_idx.empty()) {
        std::size_t correct = 0;
        for (auto i : holdout_idx) {
            const auto ex = example(i);
            correct += predict(summary.model, ex.features).label == ex.label ? 1 : 0;
        }
        summary.holdout_accuracy = static_cast<double>(correct) / static_cast<double>(holdout_idx.size());
    }
    save_model(summary.model, model_out);
    log_line(context, "trained on " + std::to_string(training.size()) + " abstracts (" +
                          std::to_string(summary.positives) + " relevant of " + std::to_string(summary.examples) + ")");
    log_line(context, summary.holdout_accuracy
                          ? "holdout accuracy: " + format_seconds(*summary.holdout_accuracy) + " on " +
                                std::to_string(summary.holdout) + " abstracts"
                          : std::string("holdout accuracy: n/a (empty holdout)"));
    return summary;
}

EvalOutput cmd_eval(const fs::path& answer_file, const fs::path& gold_file,
                    const std::optional<fs::path>& baseline_file) {
    const auto gold = load_answer_records(gold_file);
    EvalOutput output;
    output.report = evaluate(load_answer_records(answer_file), gold);
    output.report.wall_time_seconds = read_total_seconds(answer_file);
    if (baseline_file) {
        output.baseline = evaluate(load_answer_records(*baseline_file), gold);
        output.baseline->wall_time_seconds = read_total_seconds(*baseline_file);
        output.table = format_table(output.report, *output.baseline);
    } else {
        output.table = format_table(output.report);
    }
    return output;
}

FixtureReport cmd_fixtures(FixtureAction action, const fs::path& questions_file, const PipelineConfig& config,
                           const std::optional<fs::path>& model_file, const RunContext& context) {
    const auto questions = load_questions(questions_file);
    std::optional<SvmModel> model;
    if (model_file) model = load_model(*model_file);
    PipelineConfig effective = config;
    if (action == FixtureAction::Record) effective.mode = GatewayMode::Record;

    FixtureReport report;
    report.questions = questions.size();
    {
        TransportStack stack(effective, context.network, action == FixtureAction::Verify, context.clock);
        const Pipeline pipeline(effective, stack.transport());
        for (const auto& result : pipeline.answer_all(questions, model ? &*model : nullptr)) {
            if (action == FixtureAction::Record)
                for (auto& f : merged_failures(result)) report.failures.push_back(std::move(f));
        }
        if (stack.verifier()) report.misses = stack.verifier()->misses();
    }
    std::sort(report.misses.begin(), report.misses.end());
    report.misses.erase(std::unique(report.misses.begin(), report.misses.end()), report.misses.end());
    report.entries = FixtureStore(effective.store).load_all().size();
    for (const auto& [key, url] : report.misses) log_line(context, "miss " + key + " " + url);
    for (const auto& f : report.failures) log_line(context, "failed " + f);
    return report;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config:
            return 2;
        case ErrorKind::Parse:
        case ErrorKind::SchemaMismatch:
        case ErrorKind::FormatVersionMismatch:
        case ErrorKind::MalformedUrl:
            return 3;
        case ErrorKind::ReplayMiss:
            return 4;
        default:
            return 1;
    }
}

}  // namespace ws4a
