#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ws4a/annotation.hpp"
#include "ws4a/answer.hpp"
#include "ws4a/classifier.hpp"
#include "ws4a/config.hpp"
#include "ws4a/error.hpp"
#include "ws4a/eval_harness.hpp"
#include "ws4a/evaluator.hpp"
#include "ws4a/gateway.hpp"
#include "ws4a/ontology.hpp"
#include "ws4a/retriever.hpp"
#include "ws4a/transport.hpp"

namespace ws4a {

/// Ontologies from the config merged into one graph, plus the dictionaries
/// derived from it.
struct KnowledgeBase {
    OntologyGraph graph;
    ConceptDictionary local;  // ChEBI labels, matched without a service
    ConceptDictionary all;    // every label; feeds sentence similarity
};

KnowledgeBase load_knowledge(const PipelineConfig& config);

/// The transport chain implied by the gateway mode. `network` replaces live
/// HTTP when given (and is never touched in replay mode). With `verify`,
/// replay misses are collected instead of aborting the run.
class TransportStack {
public:
    explicit TransportStack(const PipelineConfig& config, Transport* network = nullptr, bool verify = false,
                            RecordingTransport::Clock clock = {});
    TransportStack(const TransportStack&) = delete;
    TransportStack& operator=(const TransportStack&) = delete;

    Transport& transport() { return *active_; }
    GatewayMode mode() const { return mode_; }
    const VerifyingTransport* verifier() const { return verifier_; }
    std::size_t replay_entries() const { return replay_ ? replay_->size() : 0; }

private:
    GatewayMode mode_;
    std::unique_ptr<Transport> owned_network_;
    std::unique_ptr<FixtureStore> store_;
    std::unique_ptr<ReplayTransport> replay_;
    std::unique_ptr<Transport> front_;
    VerifyingTransport* verifier_ = nullptr;
    Transport* active_ = nullptr;
};

struct QuestionResult {
    Question question;
    AnnotationSet query;
    CandidatePool pool;
    std::vector<GradedAbstract> graded;            // pool order
    std::vector<AnnotationSet> abstract_annotations;  // parallel to `graded`
    AnswerSet answer;
    double seconds = 0.0;
    bool degraded = false;
    std::vector<std::string> failures;
};

/// annotate -> retrieve -> annotate abstracts -> evaluate -> approve ->
/// build answer, for one question at a time or a whole batch.
class Pipeline {
public:
    Pipeline(const PipelineConfig& config, Transport& transport);
    Pipeline(const Pipeline&) = delete;
    Pipeline& operator=(const Pipeline&) = delete;

    AnnotationSet annotate(const Question& question) const;
    CandidatePool retrieve(const Question& question, const AnnotationSet& query) const;
    /// Annotates and grades every pool document without approving any.
    QuestionResult assess(const Question& question) const;
    /// With a model the classifier approves abstracts, otherwise the grade
    /// threshold does. Errors carry the question id.
    QuestionResult answer(const Question& question, const SvmModel* model = nullptr) const;
    /// Up to `question_concurrency` questions at once; results keep input order.
    std::vector<QuestionResult> answer_all(std::span<const Question> questions, const SvmModel* model = nullptr) const;

    const PipelineConfig& config() const { return config_; }
    const KnowledgeBase& knowledge() const { return knowledge_; }

private:
    PipelineConfig config_;
    KnowledgeBase knowledge_;
    std::unique_ptr<ServiceGateway> gateway_;
    AnnotationEngine engine_;
    DocumentRetriever retriever_;
    AbstractEvaluator evaluator_;
};

struct RunContext {
    /// Stand-in for live HTTP; see TransportStack.
    Transport* network = nullptr;
    /// Progress and timing lines; null silences them.
    std::ostream* log = nullptr;
    /// recorded_at stamps for new fixtures; wall-clock UTC when empty.
    RecordingTransport::Clock clock;
};

struct AnswerRun {
    std::string json;  // answer file contents
    std::vector<QuestionResult> results;
    double total_seconds = 0.0;
};

AnswerRun cmd_answer(const std::filesystem::path& questions_file, const PipelineConfig& config,
                     const std::optional<std::filesystem::path>& model_file = std::nullopt,
                     const RunContext& context = {});

/// Sidecar holding wall times next to an answer file: `x.json` -> `x.timing.json`.
std::filesystem::path timing_path(const std::filesystem::path& answer_file);
/// Writes the answer file and its timing sidecar.
void write_answer_run(const AnswerRun& run, const std::filesystem::path& answer_file);
std::optional<double> read_total_seconds(const std::filesystem::path& answer_file);

/// Question annotations as JSON, one entry per question.
std::string cmd_annotate(const std::filesystem::path& questions_file, const PipelineConfig& config,
                         const RunContext& context = {});
/// Candidate pools as JSON (pmid, date, provenance), one entry per question.
std::string cmd_retrieve(const std::filesystem::path& questions_file, const PipelineConfig& config,
                         const RunContext& context = {});

struct TrainSummary {
    SvmModel model;
    std::size_t examples = 0;
    std::size_t positives = 0;
    std::size_t holdout = 0;
    std::optional<double> holdout_accuracy;
};

/// Labels every candidate abstract by the gold documents, trains on the
/// non-holdout part and saves the model. Throws SchemaMismatch when a
/// question has no gold entry and DegenerateLabels on a single class.
TrainSummary cmd_train(const std::filesystem::path& questions_file, const std::filesystem::path& gold_file,
                       const PipelineConfig& config, const std::filesystem::path& model_out,
                       const RunContext& context = {});

struct EvalOutput {
    EvalReport report;
    std::optional<EvalReport> baseline;  // the w/o-ML answer file, when given
    std::string table;
};

/// `answer_file` is the ML run; an optional `baseline_file` (w/o ML) turns
/// the table into the two-variant comparison.
EvalOutput cmd_eval(const std::filesystem::path& answer_file, const std::filesystem::path& gold_file,
                    const std::optional<std::filesystem::path>& baseline_file = std::nullopt);

enum class FixtureAction { Record, Verify };

struct FixtureReport {
    std::size_t questions = 0;
    std::size_t entries = 0;  // store size after the run
    std::vector<std::pair<std::string, std::string>> misses;  // (key, url)
    std::vector<std::string> failures;  // per-request errors while recording
};

/// Record runs the pipeline against the network and stores every exchange;
/// verify replays the store and lists every request it cannot answer.
FixtureReport cmd_fixtures(FixtureAction action, const std::filesystem::path& questions_file,
                           const PipelineConfig& config,
                           const std::optional<std::filesystem::path>& model_file = std::nullopt,
                           const RunContext& context = {});

/// Process exit status for an error: 2 config, 3 malformed input, 4 replay
/// miss, 1 anything else.
int exit_code(ErrorKind kind);

}  // namespace ws4a
