// ws4a: command-line front end for the question-answering pipeline.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ws4a/config.hpp"
#include "ws4a/error.hpp"
#include "ws4a/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
    std::string config_file;
    std::string mode;
};

ws4a::PipelineConfig resolve_config(const GlobalOptions& global) {
    auto config = global.config_file.empty() ? ws4a::default_config(fs::current_path())
                                             : ws4a::load_config(global.config_file);
    if (!global.mode.empty()) {
        try {
            config.mode = ws4a::parse_gateway_mode(global.mode);
        } catch (const ws4a::Error& e) {
            ws4a::fail(ws4a::ErrorKind::Config, std::string("--mode: ") + e.what());
        }
    }
    return config;
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(out, std::ios::binary | std::ios::trunc);
    if (!file) ws4a::fail(ws4a::ErrorKind::Io, "cannot write " + out);
    file << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"WS4A biomedical question answering pipeline"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--config", global.config_file, "Pipeline config file")->check(CLI::ExistingFile);
    app.add_option("--mode", global.mode, "Gateway mode: record, replay or passthrough");

    std::string questions, gold, answers, baseline, out, model, report_json, action;
    ws4a::RunContext context;
    context.log = &std::cerr;

    auto* annotate = app.add_subcommand("annotate", "Annotate questions with ontology concepts");
    annotate->add_option("questions", questions, "Questions file")->required()->check(CLI::ExistingFile);
    annotate->add_option("--out", out, "Output file (default: stdout)");

    auto* retrieve = app.add_subcommand("retrieve", "Build candidate abstract pools");
    retrieve->add_option("questions", questions, "Questions file")->required()->check(CLI::ExistingFile);
    retrieve->add_option("--out", out, "Output file (default: stdout)");

    auto* answer = app.add_subcommand("answer", "Answer a question batch");
    answer->add_option("questions", questions, "Questions file")->required()->check(CLI::ExistingFile);
    answer->add_option("--model", model, "Classifier model; without it the grade threshold approves")
        ->check(CLI::ExistingFile);
    answer->add_option("--out", out, "Answer file (default: stdout)");

    auto* train = app.add_subcommand("train", "Train the relevance classifier");
    train->add_option("questions", questions, "Questions file")->required()->check(CLI::ExistingFile);
    train->add_option("gold", gold, "Gold answer file")->required()->check(CLI::ExistingFile);
    train->add_option("--out", out, "Model file")->required();

    auto* eval = app.add_subcommand("eval", "Score an answer file against gold");
    eval->add_option("answers", answers, "Answer file (the ML run)")->required()->check(CLI::ExistingFile);
    eval->add_option("gold", gold, "Gold answer file")->required()->check(CLI::ExistingFile);
    eval->add_option("--baseline", baseline, "Second answer file (w/o ML) for the comparison table")
        ->check(CLI::ExistingFile);
    eval->add_option("--report-json", report_json, "Also write the report as JSON");

    auto* fixtures = app.add_subcommand("fixtures", "Record or verify the fixture store");
    fixtures->add_option("action", action, "record or verify")->required()->check(CLI::IsMember({"record", "verify"}));
    fixtures->add_option("questions", questions, "Questions file")->required()->check(CLI::ExistingFile);
    fixtures->add_option("--model", model, "Also exercise the classifier path")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    const auto optional_path = [](const std::string& s) {
        return s.empty() ? std::nullopt : std::optional<fs::path>(s);
    };

    try {
        if (annotate->parsed()) {
            emit(ws4a::cmd_annotate(questions, resolve_config(global), context), out);
        } else if (retrieve->parsed()) {
            emit(ws4a::cmd_retrieve(questions, resolve_config(global), context), out);
        } else if (answer->parsed()) {
            const auto run = ws4a::cmd_answer(questions, resolve_config(global), optional_path(model), context);
            if (out.empty())
                std::cout << run.json;
            else
                ws4a::write_answer_run(run, out);
        } else if (train->parsed()) {
            ws4a::cmd_train(questions, gold, resolve_config(global), out, context);
        } else if (eval->parsed()) {
            const auto result = ws4a::cmd_eval(answers, gold, optional_path(baseline));
            std::cout << result.table;
            if (!report_json.empty()) {
                std::string text = ws4a::report_json(result.report);
                if (result.baseline) {
                    nlohmann::ordered_json both;
                    both["ml"] = nlohmann::ordered_json::parse(text);
                    both["without_ml"] = nlohmann::ordered_json::parse(ws4a::report_json(*result.baseline));
                    text = both.dump(2) + "\n";
                }
                emit(text, report_json);
            }
        } else if (fixtures->parsed()) {
            const auto kind = action == "record" ? ws4a::FixtureAction::Record : ws4a::FixtureAction::Verify;
            const auto report =
                ws4a::cmd_fixtures(kind, questions, resolve_config(global), optional_path(model), context);
            std::cout << "questions: " << report.questions << "\nentries: " << report.entries
                      << "\nmisses: " << report.misses.size() << "\nfailures: " << report.failures.size() << "\n";
            if (!report.misses.empty()) return ws4a::exit_code(ws4a::ErrorKind::ReplayMiss);
            if (!report.failures.empty()) return 1;
        }
    } catch (const ws4a::Error& e) {
        std::cerr << "ws4a: " << ws4a::to_string(e.kind()) << ": " << e.what() << "\n";
        return ws4a::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "ws4a: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
