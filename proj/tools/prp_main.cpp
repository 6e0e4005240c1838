// prp: progressive-rectification solving over math word problems.
//
// Subcommands: solve, eval, ingest, report. Exit codes: 0 success,
// 1 fatal error, 2 usage error. Secrets come from the environment only
// (PRP_API_KEY, PRP_BASE_URL).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "prp/backend.hpp"
#include "prp/baselines.hpp"
#include "prp/datasets.hpp"
#include "prp/engine.hpp"
#include "prp/eval.hpp"
#include "prp/fixture.hpp"
#include "prp/http_backend.hpp"
#include "prp/simulator.hpp"

namespace {

using nlohmann::json;

struct RunConfig {
    std::string method = "prp";
    std::string dataset_path;
    std::string dataset_name;
    std::string adapter = "canonical";
    std::string backend = "simulator";  // live | scripted | simulator
    std::string scripted_path;
    int k = 5;
    std::uint64_t seed = 0;
    int sc_samples = 10;
    double sc_temperature = 0.7;
    std::string hint_phrasing = "likely_not";  // likely_not | most_likely_not
    std::string verification_mode = "substitute";
    int workers = 1;
    std::string cache_dir;
    std::string output_path;
    std::string output_format = "json";
    bool tolerate_errors = false;
    double sim_p_gen = 1.0;
    double sim_p_ver = 1.0;
    std::string model_id = "default";
    int truncate_width = 100;
};

json config_to_json(const RunConfig& c) {
    return json{{"method", c.method},
                {"dataset", json{{"path", c.dataset_path}, {"name", c.dataset_name},
                                 {"adapter", c.adapter}}},
                {"backend", json{{"kind", c.backend},
                                 {"scripted_path", c.scripted_path},
                                 {"cache_dir", c.cache_dir},
                                 {"model_id", c.model_id},
                                 {"simulator", json{{"p_gen", c.sim_p_gen},
                                                    {"p_ver", c.sim_p_ver}}}}},
                {"k", c.k},
                {"seed", c.seed},
                {"sc", json{{"samples", c.sc_samples}, {"temperature", c.sc_temperature}}},
                {"hint_phrasing", c.hint_phrasing},
                {"verification_mode", c.verification_mode},
                {"workers", c.workers},
                {"output", json{{"path", c.output_path}, {"format", c.output_format}}},
                {"tolerate_errors", c.tolerate_errors},
                {"truncate_width", c.truncate_width}};
}

// File values fill in only fields the command line left at their default;
// CLI11's config support is bypassed so precedence stays flags > file >
// defaults with a nested JSON file.
void apply_config_file(RunConfig& c, const std::string& path, const CLI::App& app) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j = json::parse(in);
    auto untouched = [&](const std::string& flag) {
        const CLI::Option* opt = app.get_option_no_throw(flag);
        return opt == nullptr || opt->count() == 0;
    };
    auto take = [&](const json& node, const char* key, auto& field, const std::string& flag) {
        if (node.contains(key) && untouched(flag)) node.at(key).get_to(field);
    };
    take(j, "method", c.method, "--method");
    if (j.contains("dataset")) {
        take(j["dataset"], "path", c.dataset_path, "--dataset");
        take(j["dataset"], "name", c.dataset_name, "--dataset-name");
        take(j["dataset"], "adapter", c.adapter, "--adapter");
    }
    if (j.contains("backend")) {
        take(j["backend"], "kind", c.backend, "--backend");
        take(j["backend"], "scripted_path", c.scripted_path, "--scripted");
        take(j["backend"], "cache_dir", c.cache_dir, "--cache-dir");
        take(j["backend"], "model_id", c.model_id, "--model");
        if (j["backend"].contains("simulator")) {
            take(j["backend"]["simulator"], "p_gen", c.sim_p_gen, "--p-gen");
            take(j["backend"]["simulator"], "p_ver", c.sim_p_ver, "--p-ver");
        }
    }
    take(j, "k", c.k, "--k");
    take(j, "seed", c.seed, "--seed");
    if (j.contains("sc")) {
        take(j["sc"], "samples", c.sc_samples, "--samples");
        take(j["sc"], "temperature", c.sc_temperature, "--temperature");
    }
    take(j, "hint_phrasing", c.hint_phrasing, "--hint-phrasing");
    take(j, "verification_mode", c.verification_mode, "--mode");
    take(j, "workers", c.workers, "--workers");
    if (j.contains("output")) {
        take(j["output"], "path", c.output_path, "--out");
        take(j["output"], "format", c.output_format, "--format");
    }
    take(j, "tolerate_errors", c.tolerate_errors, "--tolerate-errors");
    take(j, "truncate_width", c.truncate_width, "--width");
}

prp::SolveConfig solve_config(const RunConfig& c) {
    prp::SolveConfig sc;
    sc.max_iterations = c.k;
    sc.rng_seed = c.seed;
    sc.verification_mode = c.verification_mode == "enumeration"
                               ? prp::VerificationMode::Enumeration
                               : prp::VerificationMode::Substitute;
    sc.hint_phrasing = c.hint_phrasing == "most_likely_not" ? prp::HintPhrasing::MostLikelyNot
                                                            : prp::HintPhrasing::LikelyNot;
    sc.sampling.model_id = c.model_id;
    return sc;
}

std::shared_ptr<prp::Backend> make_backend(const RunConfig& c,
                                           const std::vector<prp::DatasetRecord>& records) {
    std::shared_ptr<prp::Backend> backend;
    if (c.backend == "simulator") {
        prp::SimulatorConfig sim;
        sim.p_gen = c.sim_p_gen;
        sim.p_ver = c.sim_p_ver;
        for (const auto& r : records) sim.gold_by_question[r.question] = r.gold_answer;
        backend = std::make_shared<prp::SimulatorBackend>(std::move(sim));
    } else if (c.backend == "scripted") {
        if (c.scripted_path.empty())
            throw prp::BackendError(prp::ErrorKind::Config, "--scripted path required");
        auto fixture = prp::load_transcript_fixture(c.scripted_path);
        backend = std::make_shared<prp::ScriptedBackend>(std::move(fixture.script));
    } else if (c.backend == "live") {
        backend = std::make_shared<prp::HttpBackend>();  // env PRP_BASE_URL / PRP_API_KEY
        backend = std::make_shared<prp::RetryBackend>(backend, prp::RetryPolicy{}, c.seed);
        if (!c.cache_dir.empty())
            backend = std::make_shared<prp::CachingBackend>(backend, c.cache_dir);
    } else {
        throw prp::BackendError(prp::ErrorKind::Config, "unknown backend: " + c.backend);
    }
    return backend;
}

std::string truncate(const std::string& text, int width) {
    if (width <= 3 || static_cast<int>(text.size()) <= width) return text;
    return text.substr(0, static_cast<std::size_t>(width - 3)) + "...";
}

std::string answer_text(const prp::ParsedAnswer& a) {
    switch (a.kind) {
        case prp::AnswerKind::Number: return a.value->to_string();
        case prp::AnswerKind::Unknown: return "Unknown";
        default: return "Unparseable";
    }
}

void print_trace(const prp::SolveTrace& trace, int width) {
    std::cout << "question: " << truncate(trace.question, width) << "\n";
    std::cout << "initial answer: " << answer_text(trace.initial_answer) << "\n";
    for (const auto& it : trace.iterations) {
        std::cout << "iteration " << it.index << ": testing "
                  << answer_text(it.answer_under_test) << " -> ";
        switch (it.outcome.status) {
            case prp::VerificationStatus::Verified: std::cout << "verified"; break;
            case prp::VerificationStatus::Refuted: std::cout << "refuted"; break;
            case prp::VerificationStatus::Skipped: std::cout << "skipped"; break;
        }
        if (it.outcome.predicted)
            std::cout << " (predicted " << answer_text(*it.outcome.predicted) << " for masked "
                      << (it.outcome.masked_value ? it.outcome.masked_value->to_string() : "?")
                      << ")";
        std::cout << "\n";
        if (!it.incorrect_set_after.empty()) {
            std::cout << "  hint set: {";
            for (std::size_t i = 0; i < it.incorrect_set_after.size(); ++i) {
                if (i) std::cout << ", ";
                std::cout << answer_text(it.incorrect_set_after[i]);
            }
            std::cout << "}\n";
        }
        if (it.rectified_answer)
            std::cout << "  rectified to " << answer_text(*it.rectified_answer) << "\n";
    }
    std::cout << "final: " << answer_text(trace.final_answer) << " (";
    if (trace.termination == prp::Termination::VerifiedAtIteration)
        std::cout << "VerifiedAtIteration(" << trace.verified_iteration << ")";
    else
        std::cout << "BudgetExhausted";
    std::cout << ", " << trace.backend_calls << " backend calls)\n";
}

int cmd_solve(RunConfig& c, const std::string& question, const std::string& fixture_name,
              const std::string& trace_out) {
    prp::SolveConfig sc = solve_config(c);
    prp::SolveTrace trace;
    if (!fixture_name.empty() || c.backend == "scripted") {
        if (c.scripted_path.empty())
            throw prp::BackendError(prp::ErrorKind::Config, "--scripted path required");
        auto fixture = prp::load_transcript_fixture(c.scripted_path);
        sc.hint_phrasing = fixture.hint_phrasing;
        sc.rng_seed = prp::find_replay_seed(fixture);
        prp::ScriptedBackend backend(fixture.script);
        trace = prp::solve_prp(fixture.question, fixture.question_id, backend, sc);
    } else {
        if (question.empty())
            throw prp::BackendError(prp::ErrorKind::Config,
                                    "either --question or --fixture is required");
        std::vector<prp::DatasetRecord> records;
        if (c.backend == "simulator")
            records.push_back({"cli/0", question, prp::Decimal::from_int(0), std::nullopt});
        auto backend = make_backend(c, records);
        trace = prp::solve_prp(question, "cli/0", *backend, sc);
    }
    print_trace(trace, c.truncate_width);
    if (!trace_out.empty()) {
        std::ofstream out(trace_out);
        out << prp::trace_to_json(trace).dump(2) << "\n";
        std::cout << "trace written to " << trace_out << "\n";
    }
    return 0;
}

int cmd_eval(RunConfig& c) {
    if (c.dataset_path.empty())
        throw prp::BackendError(prp::ErrorKind::Config, "--dataset path required");
    std::string name = c.dataset_name.empty()
                           ? std::filesystem::path(c.dataset_path).stem().string()
                           : c.dataset_name;
    auto records = prp::load_jsonl(c.dataset_path, name, c.adapter);
    auto method = prp::method_from_name(c.method);
    if (!method) {
        throw prp::BackendError(prp::ErrorKind::Config,
                                "unknown method: " + c.method +
                                    " (known: prp, direct, zero_shot_cot, sc)");
    }
    auto backend = make_backend(c, records);

    prp::EvalOptions options;
    options.method = *method;
    options.solve = solve_config(c);
    options.sc.samples = c.sc_samples;
    options.sc.temperature = c.sc_temperature;
    options.sc.rng_seed = c.seed;
    options.workers = c.workers;
    options.tolerate_errors = c.tolerate_errors;

    prp::EvalReport report = prp::run_eval(records, name, *backend, options);
    report.config_echo = config_to_json(c);

    int failed = 0;
    for (const auto& q : report.per_question)
        if (!q.error.empty()) ++failed;

    std::cout << "dataset=" << report.dataset << " method=" << prp::method_name(report.method)
              << " n=" << report.n << " accuracy=" << report.accuracy
              << " avg_iterations=" << report.avg_iterations;
    if (failed > 0) std::cout << " failed_questions=" << failed;
    std::cout << "\n";

    if (!c.output_path.empty()) {
        prp::write_report(report, c.output_path,
                          c.output_format == "csv" ? prp::ReportFormat::Csv
                                                   : prp::ReportFormat::Json);
        std::cout << "report written to " << c.output_path << "\n";
    }
    return 0;
}

int cmd_ingest(const std::string& source, const std::string& name, const std::string& adapter,
               const std::string& out) {
    auto records = prp::load_jsonl(source, name, adapter);
    auto meta = prp::dataset_meta(name);
    if (meta) {
        auto verdict = prp::validate_counts(records, *meta);
        std::cout << verdict.message << "\n";
    } else {
        std::cout << records.size() << " records (no expected count for '" << name << "')\n";
    }
    if (!out.empty()) {
        prp::write_canonical_jsonl(records, out);
        std::cout << "written to " << out << "\n";
    }
    return 0;
}

int cmd_report(const std::string& in, const std::string& format, const std::string& out) {
    prp::EvalReport report = prp::read_report_json(in);
    std::string rendered;
    if (format == "csv") {
        rendered = prp::report_to_csv(report);
    } else {
        std::ostringstream text;
        text << "dataset: " << report.dataset << "\n"
             << "method: " << prp::method_name(report.method) << "\n"
             << "n: " << report.n << "\n"
             << "accuracy: " << report.accuracy << "\n"
             << "avg_iterations: " << report.avg_iterations << "\n";
        if (!report.iteration_curve.empty()) {
            text << "iteration_curve:";
            for (const auto& [budget, acc] : report.iteration_curve)
                text << " " << budget << ":" << acc;
            text << "\n";
        }
        for (const auto& [bucket, acc] : report.bucket_accuracy)
            text << "bucket " << bucket << ": " << acc << "\n";
        rendered = text.str();
    }
    if (out.empty()) {
        std::cout << rendered;
    } else {
        std::ofstream file(out);
        file << rendered;
        std::cout << "written to " << out << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Math word-problem solving with verify-then-rectify iteration"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    bool print_config = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file (flags override file values)");
        cmd->add_flag("--print-config", print_config, "Print the resolved config and exit");
        cmd->add_option("--backend", cfg.backend, "Backend: live, scripted, simulator");
        cmd->add_option("--scripted", cfg.scripted_path, "Transcript fixture for the scripted backend");
        cmd->add_option("--k", cfg.k, "Maximum verify-then-rectify iterations");
        cmd->add_option("--seed", cfg.seed, "Global RNG seed");
        cmd->add_option("--hint-phrasing", cfg.hint_phrasing, "likely_not or most_likely_not");
        cmd->add_option("--mode", cfg.verification_mode, "substitute or enumeration");
        cmd->add_option("--model", cfg.model_id, "Model id for live requests");
        cmd->add_option("--cache-dir", cfg.cache_dir, "Completion cache directory");
        cmd->add_option("--p-gen", cfg.sim_p_gen, "Simulator generation accuracy");
        cmd->add_option("--p-ver", cfg.sim_p_ver, "Simulator verifier fidelity");
    };

    std::string question, fixture_name, trace_out;
    CLI::App* solve = app.add_subcommand("solve", "Solve one question and print the trace");
    add_common(solve);
    solve->add_option("--question", question, "Question text");
    solve->add_option("--fixture", fixture_name, "Named transcript fixture (with --scripted)");
    solve->add_option("--json", trace_out, "Write the full trace as JSON");
    solve->add_option("--width", cfg.truncate_width, "Prompt truncation width for terminal output");

    CLI::App* eval = app.add_subcommand("eval", "Run a method over a dataset");
    add_common(eval);
    eval->add_option("--method", cfg.method, "prp, direct, zero_shot_cot, or sc");
    eval->add_option("--dataset", cfg.dataset_path, "Dataset JSONL path");
    eval->add_option("--dataset-name", cfg.dataset_name, "Dataset name (defaults to file stem)");
    eval->add_option("--adapter", cfg.adapter, "Input adapter");
    eval->add_option("--samples", cfg.sc_samples, "Self-consistency sample count");
    eval->add_option("--temperature", cfg.sc_temperature, "Self-consistency temperature");
    eval->add_option("--workers", cfg.workers, "Worker pool size");
    eval->add_option("--out", cfg.output_path, "Report output path");
    eval->add_option("--format", cfg.output_format, "json or csv");
    eval->add_flag("--tolerate-errors", cfg.tolerate_errors,
                   "Record per-question failures instead of aborting");

    std::string ingest_source, ingest_name, ingest_out;
    CLI::App* ingest = app.add_subcommand("ingest", "Normalize a dataset to canonical JSONL");
    ingest->add_option("--in", ingest_source, "Source file")->required();
    ingest->add_option("--dataset-name", ingest_name, "Dataset name")->required();
    ingest->add_option("--adapter", cfg.adapter, "Input adapter");
    ingest->add_option("--out", ingest_out, "Canonical JSONL output path");

    std::string report_in, report_format = "text", report_out;
    CLI::App* report = app.add_subcommand("report", "Re-render a JSON report");
    report->add_option("--in", report_in, "Report JSON path")->required();
    report->add_option("--format", report_format, "text or csv");
    report->add_option("--out", report_out, "Output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        if (!config_path.empty()) apply_config_file(cfg, config_path, *active);
        if (print_config) {
            std::cout << config_to_json(cfg).dump(2) << "\n";
            return 0;
        }
        if (solve->parsed()) return cmd_solve(cfg, question, fixture_name, trace_out);
        if (eval->parsed()) return cmd_eval(cfg);
        if (ingest->parsed()) return cmd_ingest(ingest_source, ingest_name, cfg.adapter, ingest_out);
        if (report->parsed()) return cmd_report(report_in, report_format, report_out);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
