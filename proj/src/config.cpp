#include "ws4a/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "ws4a/error.hpp"
#include "ws4a/text.hpp"
#include "ws4a/url.hpp"

namespace ws4a {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view raw, std::string_view expected) {
    fail(ErrorKind::Config, "config key " + std::string(key) + ": expected " + std::string(expected) + ", got '" +
                                std::string(raw) + "'");
}

std::string unquote(std::string_view raw) {
    raw = trim(raw);
    if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"') return std::string(raw);
    std::string out;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
        if (raw[i] == '\\' && i + 2 < raw.size()) ++i;
        out.push_back(raw[i]);
    }
    return out;
}

// `[a, "b"]` or a bare comma-separated list.
std::vector<std::string> parse_list(std::string_view raw) {
    raw = trim(raw);
    if (!raw.empty() && raw.front() == '[' && raw.back() == ']') raw = raw.substr(1, raw.size() - 2);
    std::vector<std::string> out;
    std::string current;
    bool quoted = false;
    for (char c : raw) {
        if (c == '"') quoted = !quoted;
        if (c == ',' && !quoted) {
            out.push_back(unquote(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!trim(current).empty() || !out.empty()) out.push_back(unquote(current));
    out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
    return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view raw) {
    const std::string text = unquote(raw);
    T value{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty()) bad_value(key, raw, "a number");
    return value;
}

std::size_t parse_positive(std::string_view key, std::string_view raw) {
    const auto value = parse_number<long long>(key, raw);
    if (value < 1) bad_value(key, raw, "an integer >= 1");
    return static_cast<std::size_t>(value);
}

bool parse_bool(std::string_view key, std::string_view raw) {
    const std::string text = to_lower(unquote(raw));
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    bad_value(key, raw, "true or false");
}

Date parse_config_date(std::string_view key, std::string_view raw) {
    try {
        return parse_date(unquote(raw));
    } catch (const Error&) {
        bad_value(key, raw, "a YYYY-MM-DD date");
    }
}

// "2014" or "2014-03-01"; empty disables the lower bound.
std::optional<SearchDate> parse_mindate(std::string_view key, std::string_view raw) {
    const std::string text = unquote(raw);
    if (text.empty()) return std::nullopt;
    if (text.size() == 4 && std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; }))
        return SearchDate{std::atoi(text.c_str()), 0, 0};
    return SearchDate::from(parse_config_date(key, raw));
}

ConceptSource parse_source(std::string_view key, std::string_view raw) {
    const auto source = parse_concept_source(unquote(raw));
    if (!source) bad_value(key, raw, "an ontology name (MESH, GO, UNIPROT, JOCHEM, DO, CHEBI)");
    return *source;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path path(value);
    return path.is_absolute() ? path : base / path;
}

using Setter = std::function<void(PipelineConfig&, std::string_view key, std::string_view raw,
                                  const std::filesystem::path& base)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table = [] {
        std::vector<std::pair<std::string, Setter>> t;
        const auto add = [&t](std::string key, Setter setter) { t.emplace_back(std::move(key), std::move(setter)); };
        add("gateway.mode", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            try {
                c.mode = parse_gateway_mode(unquote(raw));
            } catch (const Error&) {
                bad_value(key, raw, "record, replay or passthrough");
            }
        });
        add("gateway.store", [](PipelineConfig& c, std::string_view, std::string_view raw, const auto& base) {
            c.store = resolve(base, unquote(raw));
        });
        add("gateway.parallelism", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            c.gateway.parallelism = static_cast<std::ptrdiff_t>(parse_positive(key, raw));
        });
        add("gateway.efetch_chunk", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            c.gateway.efetch_chunk = parse_positive(key, raw);
        });
        add("gateway.min_delay_ms", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            const auto ms = parse_number<long long>(key, raw);
            if (ms < 0) bad_value(key, raw, "a non-negative delay");
            c.http.min_delay = std::chrono::milliseconds(ms);
        });
        add("gateway.retries", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            const auto n = parse_number<int>(key, raw);
            if (n < 0) bad_value(key, raw, "a non-negative count");
            c.http.retries = n;
        });
        add("gateway.timeout_s", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            c.http.timeout = std::chrono::seconds(parse_positive(key, raw));
        });
        add("gateway.headers", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            c.http.headers.clear();
            for (const auto& item : parse_list(raw)) {
                const auto colon = item.find(':');
                if (colon == std::string::npos || colon == 0) bad_value(key, item, "'Name: value'");
                c.http.headers.emplace_back(std::string(trim(std::string_view(item).substr(0, colon))),
                                            std::string(trim(std::string_view(item).substr(colon + 1))));
            }
        });

        const auto endpoint = [](std::string Endpoints::*member) {
            return [member](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
                auto value = unquote(raw);
                if (!is_absolute_url(value)) bad_value(key, raw, "an absolute URL");
                while (!value.empty() && value.back() == '/') value.pop_back();
                c.gateway.endpoints.*member = value;
            };
        };
        add("endpoints.annotator", endpoint(&Endpoints::annotator));
        add("endpoints.pubchem", endpoint(&Endpoints::pubchem));
        add("endpoints.uniprot", endpoint(&Endpoints::uniprot));
        add("endpoints.whatizit", endpoint(&Endpoints::whatizit));
        add("endpoints.eutils", endpoint(&Endpoints::eutils));
        add("endpoints.pubmed", endpoint(&Endpoints::pubmed));
        add("endpoints.sparql", endpoint(&Endpoints::sparql));

        add("annotator.enabled", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            c.annotation.use_remote_annotator = parse_bool(key, raw);
        });
        const auto flag = [](bool AnnotatorParams::*member) {
            return [member](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
                c.annotation.params.*member = parse_bool(key, raw);
            };
        };
        add("annotator.longest_only", flag(&AnnotatorParams::longest_only));
        add("annotator.exclude_numbers", flag(&AnnotatorParams::exclude_numbers));
        add("annotator.whole_word_only", flag(&AnnotatorParams::whole_word_only));
        add("annotator.exclude_synonyms", flag(&AnnotatorParams::exclude_synonyms));
        add("annotator.ontologies", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            c.annotation.params.ontologies.clear();
            for (const auto& item : parse_list(raw)) {
                const auto source = parse_source(key, item);
                if (source == ConceptSource::Chebi || source == ConceptSource::Uniprot)
                    bad_value(key, item, "an ontology served by the remote annotator");
                c.annotation.params.ontologies.push_back(source);
            }
        });

        add("whatizit.enabled", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            c.annotation.use_whatizit = parse_bool(key, raw);
        });
        add("whatizit.vocabulary", [](PipelineConfig& c, std::string_view, std::string_view raw, const auto&) {
            c.annotation.whatizit_vocabulary = unquote(raw);
        });
        add("whatizit.tag", [](PipelineConfig& c, std::string_view, std::string_view raw, const auto&) {
            c.gateway.whatizit.tag = unquote(raw);
        });
        add("whatizit.id_attribute", [](PipelineConfig& c, std::string_view, std::string_view raw, const auto&) {
            c.gateway.whatizit.id_attribute = unquote(raw);
        });

        // Entries are paths, optionally suffixed `@SOURCE` for unprefixed ids.
        add("ontology.files", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto& base) {
            c.ontologies.clear();
            for (const auto& item : parse_list(raw)) {
                OntologyFile file;
                const auto at = item.rfind('@');
                if (at != std::string::npos) {
                    file.default_source = parse_source(key, item.substr(at + 1));
                    file.path = resolve(base, item.substr(0, at));
                } else {
                    file.path = resolve(base, item);
                }
                c.ontologies.push_back(std::move(file));
            }
        });

        add("corpus.cutoff", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            c.cutoff = parse_config_date(key, raw);
        });
        add("retriever.mindate", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            c.retriever.mindate = parse_mindate(key, raw);
        });
        add("retriever.recency_cap", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            c.retriever.recency_cap = parse_positive(key, raw);
        });
        add("retriever.max_pmids_per_query",
            [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
                c.retriever.max_pmids_per_query = parse_positive(key, raw);
            });

        add("evaluator.weights", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            const auto items = parse_list(raw);
            if (items.size() != c.evaluator.weights.size()) bad_value(key, raw, "four weights");
            for (std::size_t i = 0; i < items.size(); ++i) c.evaluator.weights[i] = parse_number<double>(key, items[i]);
        });
        add("evaluator.threshold", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            c.evaluator.threshold = parse_number<double>(key, raw);
        });
        add("evaluator.top_k", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            c.evaluator.top_k = parse_positive(key, raw);
        });

        add("classifier.c", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            c.classifier.svm.C = parse_number<double>(key, raw);
            if (!(c.classifier.svm.C > 0.0)) bad_value(key, raw, "a positive C");
        });
        add("classifier.epochs", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            c.classifier.svm.epochs = static_cast<int>(parse_positive(key, raw));
        });
        add("classifier.seed", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            c.classifier.svm.seed = parse_number<std::uint64_t>(key, raw);
        });
        add("classifier.n_max", [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
            c.classifier.n_max = parse_positive(key, raw);
        });
        add("classifier.vocabulary_cap",
            [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
                c.classifier.vocabulary_cap = parse_positive(key, raw);
            });
        add("classifier.holdout_fraction",
            [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
                const auto f = parse_number<double>(key, raw);
                if (f < 0.0 || f >= 1.0) bad_value(key, raw, "a fraction in [0, 1)");
                c.classifier.holdout_fraction = f;
            });

        add("triples.mesh_resource_base",
            [](PipelineConfig& c, std::string_view, std::string_view raw, const auto&) {
                c.triples.mesh_resource_base = unquote(raw);
            });
        add("triples.per_concept_limit",
            [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
                c.triples.per_concept_limit = parse_positive(key, raw);
            });

        const auto cap = [](std::size_t AnswerCaps::*member) {
            return [member](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
                c.caps.*member = parse_positive(key, raw);
            };
        };
        add("caps.documents", cap(&AnswerCaps::documents));
        add("caps.snippets", cap(&AnswerCaps::snippets));
        add("caps.concepts", cap(&AnswerCaps::concepts));
        add("caps.triples", cap(&AnswerCaps::triples));

        add("pipeline.question_concurrency",
            [](PipelineConfig& c, std::string_view key, std::string_view raw, const auto&) {
                c.question_concurrency = parse_positive(key, raw);
            });
        return t;
    }();
    return table;
}

std::string env_name(std::string_view key) {
    std::string name = "WS4A_";
    for (char c : key) name.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    return name;
}

// Drops a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

PipelineConfig apply(const std::map<std::string, std::string>& values, const std::filesystem::path& base_dir,
                     const EnvLookup& env) {
    PipelineConfig config;
    config.store = base_dir / config.store;
    for (const auto& [key, setter] : setters()) {
        std::optional<std::string> raw;
        if (auto it = values.find(key); it != values.end()) raw = it->second;
        if (env) {
            if (auto overridden = env(env_name(key))) raw = *overridden;
        }
        if (raw) setter(config, key, *raw, base_dir);
    }
    config.gateway.cutoff = config.cutoff;
    config.retriever.cutoff = config.cutoff;
    config.validate();
    return config;
}

}  // namespace

void PipelineConfig::validate() const {
    if (caps.documents < 1 || caps.snippets < 1 || caps.concepts < 1 || caps.triples < 1)
        fail(ErrorKind::Config, "every answer cap must be at least 1");
    if (question_concurrency < 1 || gateway.parallelism < 1)
        fail(ErrorKind::Config, "concurrency limits must be at least 1");
    try {
        validate_weights(evaluator.weights);
    } catch (const Error& e) {
        fail(ErrorKind::Config, std::string("evaluator.weights: ") + e.what());
    }
    if (evaluator.threshold < 0.0 || evaluator.threshold > 1.0)
        fail(ErrorKind::Config, "evaluator.threshold must lie in [0, 1]");
    if (retriever.mindate) {
        const auto& m = *retriever.mindate;
        if (Date{m.year, std::max(m.month, 1), std::max(m.day, 1)} > cutoff)
            fail(ErrorKind::Config, "retriever.mindate lies after the corpus cutoff");
    }
    if (gateway.cutoff != cutoff || retriever.cutoff != cutoff)
        fail(ErrorKind::Config, "inconsistent corpus cutoff");
}

std::optional<std::string> process_environment(std::string_view name) {
    const char* value = std::getenv(std::string(name).c_str());
    if (!value) return std::nullopt;
    return std::string(value);
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& [key, setter] : setters()) out.push_back(key);
        return out;
    }();
    return keys;
}

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir, const EnvLookup& env) {
    std::map<std::string, std::string> values;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto content = trim(strip_comment(line));
        if (content.empty()) continue;
        const std::string where = "config line " + std::to_string(line_no) + ": ";
        if (content.front() == '[') {
            if (content.back() != ']' || content.size() < 3) fail(ErrorKind::Config, where + "malformed section header");
            section = to_lower(trim(content.substr(1, content.size() - 2)));
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string_view::npos) fail(ErrorKind::Config, where + "expected 'key = value'");
        std::string key = to_lower(trim(content.substr(0, eq)));
        if (key.empty()) fail(ErrorKind::Config, where + "empty key");
        if (!section.empty()) key = section + "." + key;
        const auto known = std::find_if(setters().begin(), setters().end(),
                                        [&key](const auto& entry) { return entry.first == key; });
        if (known == setters().end()) fail(ErrorKind::Config, where + "unknown key '" + key + "'");
        if (!values.emplace(key, std::string(trim(content.substr(eq + 1)))).second)
            fail(ErrorKind::Config, where + "duplicate key '" + key + "'");
    }
    return apply(values, base_dir, env);
}

PipelineConfig load_config(const std::filesystem::path& path, const EnvLookup& env) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Config, "cannot read config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path(), env);
}

PipelineConfig default_config(const std::filesystem::path& base_dir, const EnvLookup& env) {
    return apply({}, base_dir, env);
}

}  // namespace ws4a
