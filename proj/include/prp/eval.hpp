#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "prp/backend.hpp"
#include "prp/baselines.hpp"
#include "prp/datasets.hpp"
#include "prp/engine.hpp"

namespace prp {

enum class Method { PRP, Direct, ZeroShotCoT, SelfConsistency };

std::string method_name(Method method);
std::optional<Method> method_from_name(const std::string& name);

struct PerQuestionResult {
    std::string id;
    ParsedAnswer final_answer;
    int correct = 0;
    int iterations_used = 0;  // PRP only; 0 otherwise
    std::string error;        // non-empty when the question failed and errors are tolerated
};

struct EvalReport {
    std::string dataset;
    Method method = Method::PRP;
    int n = 0;
    double accuracy = 0.0;
    std::vector<std::pair<int, double>> iteration_curve;  // PRP only, budgets 0..K
    double avg_iterations = 0.0;                          // PRP only
    std::map<std::string, double> bucket_accuracy;
    std::vector<PerQuestionResult> per_question;
    nlohmann::json config_echo;
    double wall_time_seconds = 0.0;
};

struct EvalOptions {
    Method method = Method::PRP;
    SolveConfig solve;       // K, seed, verification mode, hint phrasing, sampling
    SCConfig sc;             // self-consistency only
    int workers = 1;
    bool tolerate_errors = false;
};

/// Mean of the correctness indicator. Questions that errored count as
/// incorrect (their answer is Unparseable).
double accuracy(const std::vector<PerQuestionResult>& per_question);

/// Accuracy of answer_at_budget for every budget 0..K. All traces must
/// share the same K.
std::vector<std::pair<int, double>> iteration_curve(const std::vector<SolveTrace>& traces,
                                                    const std::vector<Decimal>& golds, int k);

/// Mean iteration index at termination (BudgetExhausted counts as K).
double average_iterations(const std::vector<SolveTrace>& traces);

/// Runs a method over a dataset with a bounded worker pool. Per-question
/// seeds derive from (seed, id), so the report is independent of worker
/// scheduling.
EvalReport run_eval(const std::vector<DatasetRecord>& records, const std::string& dataset_name,
                    Backend& backend, const EvalOptions& options);

/// Canonical JSON (sorted keys, byte-stable given equal reports).
nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

enum class ReportFormat { Json, Csv };

void write_report(const EvalReport& report, const std::filesystem::path& path,
                  ReportFormat format);
EvalReport read_report_json(const std::filesystem::path& path);
std::string report_to_csv(const EvalReport& report);

}  // namespace prp
