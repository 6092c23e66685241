#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ws4a/domain.hpp"
#include "ws4a/evaluator.hpp"

namespace ws4a {

/// Ordered n-gram feature set; positions are contiguous from 0.
class Vocabulary {
public:
    Vocabulary() = default;
    Vocabulary(std::vector<std::string> entries, std::size_t n_max);

    const std::vector<std::string>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t n_max() const { return n_max_; }
    std::optional<std::size_t> position(const std::string& ngram) const;

    bool operator==(const Vocabulary& other) const {
        return entries_ == other.entries_ && n_max_ == other.n_max_;
    }

private:
    std::vector<std::string> entries_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t n_max_ = 2;
};

inline constexpr std::size_t kDefaultVocabularyCap = 5000;

/// n-grams of title + text ranked by document frequency (descending), ties
/// by the n-gram string; the first `cap` are kept.
Vocabulary build_vocabulary(std::span<const AbstractDoc> corpus, std::size_t n_max = 2,
                            std::size_t cap = kDefaultVocabularyCap);

inline constexpr std::size_t kDenseFeatures = 4;

struct FeatureVector {
    std::array<double, kDenseFeatures> dense{};
    /// Sorted (position, weight) pairs; weights are binary.
    std::vector<std::pair<std::size_t, double>> sparse;
    std::size_t vocabulary_size = 0;
};

FeatureVector extract_features(const AbstractDoc& doc, const ScoreVector& scores, const Vocabulary& vocabulary);

struct SvmHyperparams {
    double C = 1.0;
    int epochs = 20;
    std::uint64_t seed = 42;

    bool operator==(const SvmHyperparams&) const = default;
};

struct SvmModel {
    std::vector<double> weights;  // dense block first, then one per vocabulary entry
    double bias = 0.0;
    SvmHyperparams hyperparams;
    Vocabulary vocabulary;
};

struct LabeledExample {
    FeatureVector features;
    int label = 1;  // +1 or -1
};

/// Regularized hinge loss: (λ/2)|w|² + mean(max(0, 1 - y(w·x + b))), λ = 1/C.
double svm_objective(const SvmModel& model, std::span<const LabeledExample> examples);

/// Deterministic epoch-based subgradient descent (step 1/(λt), seeded
/// shuffling per epoch, unregularized bias). When `objective_trace` is
/// given it receives the objective after every epoch.
SvmModel train(std::span<const LabeledExample> examples, const SvmHyperparams& hyperparams,
               const Vocabulary& vocabulary, std::vector<double>* objective_trace = nullptr);

struct Prediction {
    int label = 1;
    double margin = 0.0;
};

/// margin = w·x + b; a zero margin counts as relevant.
Prediction predict(const SvmModel& model, const FeatureVector& features);

int label_from_gold(const AbstractDoc& doc, const std::set<std::string>& gold_pmids);

/// Seeded split of [0, n): (train indices, holdout indices).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_holdout(std::size_t n, double holdout_fraction,
                                                                              std::uint64_t seed);

/// Fisher-Yates over std::mt19937_64, identical on every platform.
void deterministic_shuffle(std::vector<std::size_t>& items, std::mt19937_64& rng);

std::string serialize_model(const SvmModel& model);
/// Throws FormatVersionMismatch on a wrong header, damaged body or checksum.
SvmModel parse_model(std::string_view text);
void save_model(const SvmModel& model, const std::filesystem::path& path);
SvmModel load_model(const std::filesystem::path& path);

}  // namespace ws4a
