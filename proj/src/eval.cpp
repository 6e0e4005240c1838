#include "prp/eval.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace prp {

std::string method_name(Method method) {
    switch (method) {
        case Method::PRP: return "PRP";
        case Method::Direct: return "Direct";
        case Method::ZeroShotCoT: return "ZeroShotCoT";
        case Method::SelfConsistency: return "SelfConsistency";
    }
    return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
    if (name == "PRP" || name == "prp") return Method::PRP;
    if (name == "Direct" || name == "direct") return Method::Direct;
    if (name == "ZeroShotCoT" || name == "zero-shot-cot" || name == "zscot")
        return Method::ZeroShotCoT;
    if (name == "SelfConsistency" || name == "sc") return Method::SelfConsistency;
    return std::nullopt;
}

double accuracy(const std::vector<PerQuestionResult>& per_question) {
    if (per_question.empty()) throw std::invalid_argument("accuracy: empty input");
    double sum = 0.0;
    for (const auto& q : per_question) sum += q.correct;
    return sum / static_cast<double>(per_question.size());
}

std::vector<std::pair<int, double>> iteration_curve(const std::vector<SolveTrace>& traces,
                                                    const std::vector<Decimal>& golds, int k) {
    if (traces.size() != golds.size())
        throw std::invalid_argument("iteration_curve: traces/golds size mismatch");
    for (const auto& trace : traces) {
        if (trace.max_iterations != k)
            throw std::invalid_argument("iteration_curve: trace with mismatched K");
    }
    std::vector<std::pair<int, double>> curve;
    for (int budget = 0; budget <= k; ++budget) {
        double sum = 0.0;
        for (std::size_t i = 0; i < traces.size(); ++i) {
            sum += correctness_indicator(answer_at_budget(traces[i], budget), golds[i]);
        }
        curve.emplace_back(budget,
                           traces.empty() ? 0.0 : sum / static_cast<double>(traces.size()));
    }
    return curve;
}

double average_iterations(const std::vector<SolveTrace>& traces) {
    if (traces.empty()) throw std::invalid_argument("average_iterations: empty input");
    double sum = 0.0;
    for (const auto& trace : traces) {
        sum += trace.termination == Termination::VerifiedAtIteration
                   ? trace.verified_iteration
                   : trace.max_iterations;
    }
    return sum / static_cast<double>(traces.size());
}

namespace {

nlohmann::json options_echo(const EvalOptions& options) {
    return nlohmann::json{
        {"method", method_name(options.method)},
        {"max_iterations", options.solve.max_iterations},
        {"rng_seed", options.solve.rng_seed},
        {"verification_mode",
         options.solve.verification_mode == VerificationMode::Substitute ? "substitute"
                                                                         : "enumeration"},
        {"hint_phrasing", options.solve.hint_phrasing == HintPhrasing::LikelyNot
                              ? "likely_not"
                              : "most_likely_not"},
        {"temperature", options.solve.sampling.temperature},
        {"max_tokens", options.solve.sampling.max_tokens},
        {"model_id", options.solve.sampling.model_id},
        {"sc_samples", options.sc.samples},
        {"sc_temperature", options.sc.temperature},
        {"tolerate_errors", options.tolerate_errors},
    };
}

}  // namespace

EvalReport run_eval(const std::vector<DatasetRecord>& records, const std::string& dataset_name,
                    Backend& backend, const EvalOptions& options) {
    auto start = std::chrono::steady_clock::now();
    const std::size_t n = records.size();

    std::vector<PerQuestionResult> results(n);
    std::vector<SolveTrace> traces(options.method == Method::PRP ? n : 0);

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (!failed.load()) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            const DatasetRecord& record = records[i];
            PerQuestionResult result;
            result.id = record.id;
            try {
                switch (options.method) {
                    case Method::PRP: {
                        SolveTrace trace =
                            solve_prp(record.question, record.id, backend, options.solve);
                        result.final_answer = trace.final_answer;
                        result.iterations_used =
                            trace.termination == Termination::VerifiedAtIteration
                                ? trace.verified_iteration
                                : trace.max_iterations;
                        traces[i] = std::move(trace);
                        break;
                    }
                    case Method::Direct:
                        result.final_answer =
                            solve_direct(record.question, backend, options.solve.sampling);
                        break;
                    case Method::ZeroShotCoT: {
                        SolveConfig config = options.solve;
                        result.final_answer =
                            solve_zero_shot_cot(record.question, backend, config).second;
                        break;
                    }
                    case Method::SelfConsistency:
                        result.final_answer = solve_self_consistency(
                            record.question, record.id, backend, options.sc,
                            options.solve.sampling);
                        break;
                }
                result.correct = correctness_indicator(result.final_answer, record.gold_answer);
            } catch (const std::exception& e) {
                if (!options.tolerate_errors) {
                    std::lock_guard lock(error_mutex);
                    if (first_error.empty()) first_error = e.what();
                    failed.store(true);
                    return;
                }
                result.final_answer = ParsedAnswer::unparseable();
                result.correct = 0;
                result.error = e.what();
                if (options.method == Method::PRP) {
                    if (const auto* solve_error = dynamic_cast<const SolveError*>(&e)) {
                        traces[i] = solve_error->partial_trace;
                    } else {
                        SolveTrace empty;
                        empty.question = record.question;
                        empty.question_id = record.id;
                        empty.max_iterations = options.solve.max_iterations;
                        traces[i] = std::move(empty);
                    }
                }
            }
            results[i] = std::move(result);
        }
    };

    int worker_count = options.workers < 1 ? 1 : options.workers;
    std::vector<std::thread> pool;
    for (int w = 1; w < worker_count; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    if (failed.load()) throw std::runtime_error("eval aborted: " + first_error);

    EvalReport report;
    report.dataset = dataset_name;
    report.method = options.method;
    report.n = static_cast<int>(n);
    report.per_question = std::move(results);
    report.accuracy = n == 0 ? 0.0 : accuracy(report.per_question);
    report.config_echo = options_echo(options);

    if (options.method == Method::PRP && n > 0) {
        std::vector<Decimal> golds;
        golds.reserve(n);
        for (const auto& record : records) golds.push_back(record.gold_answer);
        report.iteration_curve = iteration_curve(traces, golds, options.solve.max_iterations);
        report.avg_iterations = average_iterations(traces);
    }

    // Difficulty buckets over records that carry n_steps.
    std::map<std::string, std::pair<int, int>> bucket_counts;  // bucket -> (correct, total)
    for (std::size_t i = 0; i < n; ++i) {
        if (!records[i].n_steps) continue;
        auto& [correct, total] = bucket_counts[bucket_for_steps(*records[i].n_steps)];
        correct += report.per_question[i].correct;
        ++total;
    }
    for (const auto& [bucket, counts] : bucket_counts) {
        report.bucket_accuracy[bucket] =
            static_cast<double>(counts.first) / static_cast<double>(counts.second);
    }

    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json per_question = nlohmann::json::array();
    for (const auto& q : report.per_question) {
        nlohmann::json row = {{"id", q.id},
                              {"final_answer", parsed_answer_to_json(q.final_answer)},
                              {"correct", q.correct},
                              {"iterations_used", q.iterations_used}};
        if (!q.error.empty()) row["error"] = q.error;
        per_question.push_back(row);
    }
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& [budget, acc] : report.iteration_curve)
        curve.push_back({{"budget", budget}, {"accuracy", acc}});
    return nlohmann::json{
        {"dataset", report.dataset},
        {"method", method_name(report.method)},
        {"n", report.n},
        {"accuracy", report.accuracy},
        {"iteration_curve", curve},
        {"avg_iterations", report.avg_iterations},
        {"bucket_accuracy", report.bucket_accuracy},
        {"per_question", per_question},
        {"config_echo", report.config_echo},
        {"wall_time_seconds", report.wall_time_seconds},
    };
}

EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport report;
    report.dataset = j.at("dataset").get<std::string>();
    auto method = method_from_name(j.at("method").get<std::string>());
    if (!method) throw std::runtime_error("report_from_json: unknown method");
    report.method = *method;
    report.n = j.at("n").get<int>();
    report.accuracy = j.at("accuracy").get<double>();
    for (const auto& point : j.at("iteration_curve"))
        report.iteration_curve.emplace_back(point.at("budget").get<int>(),
                                            point.at("accuracy").get<double>());
    report.avg_iterations = j.value("avg_iterations", 0.0);
    if (j.contains("bucket_accuracy"))
        report.bucket_accuracy = j["bucket_accuracy"].get<std::map<std::string, double>>();
    for (const auto& row : j.at("per_question")) {
        PerQuestionResult q;
        q.id = row.at("id").get<std::string>();
        q.final_answer = parsed_answer_from_json(row.at("final_answer"));
        q.correct = row.at("correct").get<int>();
        q.iterations_used = row.at("iterations_used").get<int>();
        q.error = row.value("error", "");
        report.per_question.push_back(std::move(q));
    }
    report.config_echo = j.value("config_echo", nlohmann::json::object());
    report.wall_time_seconds = j.value("wall_time_seconds", 0.0);
    return report;
}

std::string report_to_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "# dataset," << report.dataset << '\n';
    out << "# method," << method_name(report.method) << '\n';
    out << "# n," << report.n << '\n';
    out << "# accuracy," << report.accuracy << '\n';
    if (report.method == Method::PRP) out << "# avg_iterations," << report.avg_iterations << '\n';
    out << "id,final_answer,correct,iterations_used,error\n";
    for (const auto& q : report.per_question) {
        std::string answer = q.final_answer.is_number() ? q.final_answer.value->to_string()
                             : q.final_answer.kind == AnswerKind::Unknown ? "unknown"
                                                                          : "unparseable";
        std::string error = q.error;
        for (auto& c : error)
            if (c == ',' || c == '\n') c = ';';
        out << q.id << ',' << answer << ',' << q.correct << ',' << q.iterations_used << ','
            << error << '\n';
    }
    return out.str();
}

void write_report(const EvalReport& report, const std::filesystem::path& path,
                  ReportFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path.string());
    if (format == ReportFormat::Json)
        out << report_to_json(report).dump(2) << '\n';
    else
        out << report_to_csv(report);
}

EvalReport read_report_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read report: " + path.string());
    return report_from_json(nlohmann::json::parse(in));
}

}  // namespace prp
