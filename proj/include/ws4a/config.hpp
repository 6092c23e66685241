#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ws4a/annotation.hpp"
#include "ws4a/answer.hpp"
#include "ws4a/classifier.hpp"
#include "ws4a/evaluator.hpp"
#include "ws4a/gateway.hpp"
#include "ws4a/ontology.hpp"
#include "ws4a/retriever.hpp"
#include "ws4a/transport.hpp"

namespace ws4a {

struct OntologyFile {
    std::filesystem::path path;
    ConceptSource default_source = ConceptSource::Mesh;
};

struct ClassifierConfig {
    SvmHyperparams svm;
    std::size_t n_max = 2;
    std::size_t vocabulary_cap = kDefaultVocabularyCap;
    double holdout_fraction = 0.2;
};

/// Everything the pipeline needs, with the historical constants as defaults.
struct PipelineConfig {
    GatewayMode mode = GatewayMode::Replay;
    std::filesystem::path store = "store";  // relative to the config file
    GatewayOptions gateway;
    HttpOptions http;

    std::vector<OntologyFile> ontologies;

    AnnotationOptions annotation;
    RetrieverOptions retriever;
    EvaluatorOptions evaluator;
    ClassifierConfig classifier;
    TripleOptions triples;
    AnswerCaps caps;
    Date cutoff = kDefaultCutoff;
    std::size_t question_concurrency = 2;

    /// Throws Config: caps and limits >= 1, weights summing to 1, threshold
    /// in [0,1], mindate not after the cutoff.
    void validate() const;
};

/// Returns the value of an environment variable, if set.
using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;

std::optional<std::string> process_environment(std::string_view name);

/// TOML-style flat file: `[section]` headers, `key = value` lines, `#`
/// comments, quoted strings and `[a, b]` lists. Every key `section.key` can
/// be overridden by the variable WS4A_SECTION_KEY. Relative paths resolve
/// against `base_dir`. Throws Config on unknown keys or bad values.
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir,
                            const EnvLookup& env = process_environment);
PipelineConfig load_config(const std::filesystem::path& path, const EnvLookup& env = process_environment);
/// Defaults plus environment overrides, for runs without a config file.
PipelineConfig default_config(const std::filesystem::path& base_dir, const EnvLookup& env = process_environment);

/// Names of every recognised `section.key`, in file order.
const std::vector<std::string>& config_keys();

}  // namespace ws4a
