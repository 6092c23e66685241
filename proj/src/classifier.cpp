#include "ws4a/classifier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ws4a/error.hpp"
#include "ws4a/hash.hpp"
#include "ws4a/text.hpp"

namespace ws4a {

namespace {

constexpr std::string_view kModelHeader = "ws4a-svm-model 1";

double dot(const SvmModel& model, const FeatureVector& x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < kDenseFeatures; ++i) sum += model.weights[i] * x.dense[i];
    for (const auto& [position, value] : x.sparse) sum += model.weights[kDenseFeatures + position] * value;
    return sum;
}

void check_dimension(const SvmModel& model, const FeatureVector& x) {
    if (x.vocabulary_size != model.vocabulary.size() ||
        model.weights.size() != kDenseFeatures + model.vocabulary.size())
        fail(ErrorKind::DimensionMismatch, "feature vector built for a vocabulary of " +
                                               std::to_string(x.vocabulary_size) + " entries, model has " +
                                               std::to_string(model.vocabulary.size()));
    for (const auto& [position, value] : x.sparse)
        if (position >= model.vocabulary.size())
            fail(ErrorKind::DimensionMismatch, "sparse feature position out of range");
}

std::string hex_double(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::hex);
    return std::string(buffer, ptr);
}

[[noreturn]] void corrupt(const std::string& what) {
    fail(ErrorKind::FormatVersionMismatch, "model file: " + what);
}

double parse_hex_double(std::string_view text) {
    double value = 0.0;
    bool negative = !text.empty() && text.front() == '-';
    if (negative) text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, std::chars_format::hex);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) corrupt("bad number");
    return negative ? -value : value;
}

template <typename Int>
Int parse_integer(std::string_view text) {
    Int value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) corrupt("bad integer");
    return value;
}

std::string_view expect_field(std::string_view line, std::string_view name) {
    if (line.size() <= name.size() || line.substr(0, name.size()) != name || line[name.size()] != ' ')
        corrupt("expected '" + std::string(name) + "' line");
    return line.substr(name.size() + 1);
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> entries, std::size_t n_max)
    : entries_(std::move(entries)), n_max_(n_max) {
    if (n_max_ < 1) fail(ErrorKind::InvalidArgument, "vocabulary n_max must be >= 1");
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (!index_.emplace(entries_[i], i).second)
            fail(ErrorKind::InvalidArgument, "duplicate vocabulary entry '" + entries_[i] + "'");
}

std::optional<std::size_t> Vocabulary::position(const std::string& ngram) const {
    auto it = index_.find(ngram);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Vocabulary build_vocabulary(std::span<const AbstractDoc> corpus, std::size_t n_max, std::size_t cap) {
    if (corpus.empty()) fail(ErrorKind::InvalidArgument, "build_vocabulary: corpus is empty");
    std::map<std::string, std::size_t> document_frequency;
    for (const auto& doc : corpus) {
        auto grams = ngrams(tokenize(doc.annotated_text()), n_max);
        std::sort(grams.begin(), grams.end());
        grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
        for (auto& gram : grams) ++document_frequency[std::move(gram)];
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(document_frequency.begin(), document_frequency.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > cap) ranked.resize(cap);
    std::vector<std::string> entries;
    entries.reserve(ranked.size());
    for (auto& [gram, df] : ranked) entries.push_back(std::move(gram));
    return Vocabulary(std::move(entries), n_max);
}

FeatureVector extract_features(const AbstractDoc& doc, const ScoreVector& scores, const Vocabulary& vocabulary) {
    FeatureVector out;
    out.dense = scores.as_array();
    out.vocabulary_size = vocabulary.size();
    std::set<std::size_t> present;
    for (const auto& gram : ngrams(tokenize(doc.annotated_text()), vocabulary.n_max()))
        if (auto position = vocabulary.position(gram)) present.insert(*position);
    for (std::size_t position : present) out.sparse.emplace_back(position, 1.0);
    return out;
}

double svm_objective(const SvmModel& model, std::span<const LabeledExample> examples) {
    const double lambda = 1.0 / model.hyperparams.C;
    double norm = 0.0;
    for (double w : model.weights) norm += w * w;
    double loss = 0.0;
    for (const auto& example : examples)
        loss += std::max(0.0, 1.0 - example.label * (dot(model, example.features) + model.bias));
    return 0.5 * lambda * norm + (examples.empty() ? 0.0 : loss / static_cast<double>(examples.size()));
}

void deterministic_shuffle(std::vector<std::size_t>& items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(items[i - 1], items[j]);
    }
}

SvmModel train(std::span<const LabeledExample> examples, const SvmHyperparams& hyperparams,
               const Vocabulary& vocabulary, std::vector<double>* objective_trace) {
    if (!(hyperparams.C > 0.0)) fail(ErrorKind::InvalidArgument, "SVM C must be > 0");
    if (hyperparams.epochs < 1) fail(ErrorKind::InvalidArgument, "SVM epochs must be >= 1");
    bool has_positive = false, has_negative = false;
    for (const auto& example : examples) {
        if (example.label != 1 && example.label != -1)
            fail(ErrorKind::InvalidArgument, "labels must be +1 or -1");
        (example.label > 0 ? has_positive : has_negative) = true;
    }
    if (!has_positive || !has_negative)
        fail(ErrorKind::DegenerateLabels, "training data needs both relevant and irrelevant examples");

    SvmModel model;
    model.hyperparams = hyperparams;
    model.vocabulary = vocabulary;
    model.weights.assign(kDenseFeatures + vocabulary.size(), 0.0);
    for (const auto& example : examples) check_dimension(model, example.features);

    const double lambda = 1.0 / hyperparams.C;
    std::mt19937_64 rng(hyperparams.seed);
    std::vector<std::size_t> order(examples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    // An epoch that raises the objective is rolled back, so the epoch-boundary
    // objective never increases; the step schedule keeps shrinking regardless.
    std::vector<double> kept_weights = model.weights;
    double kept_bias = model.bias;
    double kept_objective = svm_objective(model, examples);

    std::uint64_t t = 0;
    for (int epoch = 0; epoch < hyperparams.epochs; ++epoch) {
        deterministic_shuffle(order, rng);
        for (std::size_t index : order) {
            ++t;
            const auto& example = examples[index];
            const double step = 1.0 / (lambda * static_cast<double>(t));
            const double margin = example.label * (dot(model, example.features) + model.bias);
            const double shrink = 1.0 - step * lambda;
            for (double& w : model.weights) w *= shrink;
            if (margin < 1.0) {
                const double push = step * example.label;
                for (std::size_t i = 0; i < kDenseFeatures; ++i) model.weights[i] += push * example.features.dense[i];
                for (const auto& [position, value] : example.features.sparse)
                    model.weights[kDenseFeatures + position] += push * value;
                model.bias += push;
            }
        }
        const double objective = svm_objective(model, examples);
        if (objective > kept_objective) {
            model.weights = kept_weights;
            model.bias = kept_bias;
        } else {
            kept_weights = model.weights;
            kept_bias = model.bias;
            kept_objective = objective;
        }
        if (objective_trace) objective_trace->push_back(kept_objective);
    }
    return model;
}

Prediction predict(const SvmModel& model, const FeatureVector& features) {
    check_dimension(model, features);
    const double margin = dot(model, features) + model.bias;
    return {margin >= 0.0 ? 1 : -1, margin};
}

int label_from_gold(const AbstractDoc& doc, const std::set<std::string>& gold_pmids) {
    return gold_pmids.count(doc.pmid) ? 1 : -1;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_holdout(std::size_t n, double holdout_fraction,
                                                                              std::uint64_t seed) {
    if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0))
        fail(ErrorKind::InvalidArgument, "holdout fraction must be in [0,1)");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    deterministic_shuffle(order, rng);
    const auto holdout = static_cast<std::size_t>(std::floor(holdout_fraction * static_cast<double>(n)));
    std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(holdout));
    std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(holdout), order.end());
    std::sort(test.begin(), test.end());
    std::sort(rest.begin(), rest.end());
    return {rest, test};
}

std::string serialize_model(const SvmModel& model) {
    if (model.weights.size() != kDenseFeatures + model.vocabulary.size())
        fail(ErrorKind::DimensionMismatch, "model weights do not match its vocabulary");
    std::ostringstream out;
    out << kModelHeader << '\n';
    out << "C " << hex_double(model.hyperparams.C) << '\n';
    out << "epochs " << model.hyperparams.epochs << '\n';
    out << "seed " << model.hyperparams.seed << '\n';
    out << "n_max " << model.vocabulary.n_max() << '\n';
    out << "bias " << hex_double(model.bias) << '\n';
    out << "dense";
    for (std::size_t i = 0; i < kDenseFeatures; ++i) out << ' ' << hex_double(model.weights[i]);
    out << '\n';
    out << "vocab " << model.vocabulary.size() << '\n';
    for (std::size_t i = 0; i < model.vocabulary.size(); ++i)
        out << hex_double(model.weights[kDenseFeatures + i]) << '\t' << model.vocabulary.entries()[i] << '\n';
    std::string body = out.str();
    return body + "checksum " + sha256_hex(body) + "\n";
}

SvmModel parse_model(std::string_view text) {
    const auto checksum_at = text.rfind("checksum ");
    if (text.substr(0, kModelHeader.size() + 1) != std::string(kModelHeader) + "\n")
        corrupt("unsupported header (expected '" + std::string(kModelHeader) + "')");
    if (checksum_at == std::string_view::npos) corrupt("missing checksum");
    const auto body = text.substr(0, checksum_at);
    const auto recorded = trim(text.substr(checksum_at + 9));
    if (recorded != sha256_hex(body)) corrupt("checksum mismatch");

    std::vector<std::string_view> lines;
    for (std::size_t start = 0; start < body.size();) {
        auto end = body.find('\n', start);
        if (end == std::string_view::npos) corrupt("unterminated line");
        lines.push_back(body.substr(start, end - start));
        start = end + 1;
    }
    if (lines.size() < 8) corrupt("truncated");

    SvmModel model;
    model.hyperparams.C = parse_hex_double(expect_field(lines[1], "C"));
    model.hyperparams.epochs = parse_integer<int>(expect_field(lines[2], "epochs"));
    model.hyperparams.seed = parse_integer<std::uint64_t>(expect_field(lines[3], "seed"));
    const auto n_max = parse_integer<std::size_t>(expect_field(lines[4], "n_max"));
    model.bias = parse_hex_double(expect_field(lines[5], "bias"));
    auto dense = expect_field(lines[6], "dense");
    for (std::size_t i = 0; i < kDenseFeatures; ++i) {
        const auto space = dense.find(' ');
        model.weights.push_back(parse_hex_double(dense.substr(0, space)));
        dense = space == std::string_view::npos ? std::string_view{} : dense.substr(space + 1);
    }
    if (!dense.empty()) corrupt("too many dense weights");
    const auto vocab_size = parse_integer<std::size_t>(expect_field(lines[7], "vocab"));
    if (lines.size() != 8 + vocab_size) corrupt("vocabulary length does not match");
    std::vector<std::string> entries;
    for (std::size_t i = 0; i < vocab_size; ++i) {
        const auto line = lines[8 + i];
        const auto tab = line.find('\t');
        if (tab == std::string_view::npos) corrupt("bad vocabulary line");
        model.weights.push_back(parse_hex_double(line.substr(0, tab)));
        entries.emplace_back(line.substr(tab + 1));
    }
    try {
        model.vocabulary = Vocabulary(std::move(entries), n_max);
    } catch (const Error& e) {
        corrupt(e.what());
    }
    return model;
}

void save_model(const SvmModel& model, const std::filesystem::path& path) {
    const std::string text = serialize_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write model file " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) fail(ErrorKind::Io, "short write to model file " + path.string());
}

SvmModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot read model file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_model(buffer.str());
}

}  // namespace ws4a
