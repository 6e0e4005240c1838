#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "prp/backend.hpp"
#include "prp/numerics.hpp"
#include "prp/prompts.hpp"
#include "prp/rng.hpp"

namespace prp {

enum class VerificationMode { Substitute, Enumeration };

struct SolveConfig {
    int max_iterations = 5;  // K
    std::uint64_t rng_seed = 0;
    VerificationMode verification_mode = VerificationMode::Substitute;
    HintPhrasing hint_phrasing = HintPhrasing::LikelyNot;
    BackendParams sampling;
};

enum class VerificationStatus { Verified, Refuted, Skipped };

struct VerificationOutcome {
    VerificationStatus status = VerificationStatus::Skipped;
    std::optional<Decimal> masked_value;       // absent when Skipped
    std::optional<ParsedAnswer> predicted;     // absent when Skipped
    std::string verification_question_text;
};

struct IterationRecord {
    int index = 0;  // 1-based
    ParsedAnswer answer_under_test;
    VerificationOutcome outcome;
    std::optional<ParsedAnswer> rectified_answer;  // present iff not Verified
    std::string rectified_reasoning;
    std::vector<ParsedAnswer> incorrect_set_after;  // C_i, insertion order
};

enum class Termination { VerifiedAtIteration, BudgetExhausted };

/// Full record of one PRP run.
struct SolveTrace {
    std::string question;
    std::string question_id;
    int max_iterations = 0;  // K the trace was produced with
    std::string initial_reasoning;
    ParsedAnswer initial_answer;
    std::vector<IterationRecord> iterations;
    ParsedAnswer final_answer;
    Termination termination = Termination::BudgetExhausted;
    int verified_iteration = 0;  // meaningful when termination is VerifiedAtIteration
    int backend_calls = 0;
};

/// Backend failure during a solve; carries whatever had been recorded.
class SolveError : public std::runtime_error {
public:
    SolveError(const std::string& message, SolveTrace partial)
        : std::runtime_error(message), partial_trace(std::move(partial)) {}

    SolveTrace partial_trace;
};

/// RNG stream that drives mask selection for one question; schedule
/// independent because it is derived from (rng_seed, question_id) alone.
inline RngStream mask_stream(const SolveConfig& config, std::string_view question_id) {
    return question_stream(config.rng_seed, question_id);
}

/// Zero-shot initialization: reasoning prompt then answer extraction.
/// Two backend calls.
std::pair<std::string, ParsedAnswer> initialize(const std::string& question, Backend& backend,
                                                const SolveConfig& config,
                                                int* backend_calls = nullptr,
                                                std::uint64_t call_seed_base = 0);

/// One round of substitute verification: mask a uniformly drawn numeral,
/// ask for X given the candidate answer, compare under tolerance. Skipped
/// (no backend calls) when the answer is non-numeric or the question has
/// no numerals.
VerificationOutcome substitute_verify(const std::string& question, const ParsedAnswer& answer,
                                      RngStream& rng, Backend& backend, const SolveConfig& config,
                                      int* backend_calls = nullptr,
                                      std::uint64_t call_seed_base = 0);

/// Masks every numeral in turn; Verified only when every prediction
/// matches, Refuted at the first mismatch.
VerificationOutcome enumeration_verify(const std::string& question, const ParsedAnswer& answer,
                                       Backend& backend, const SolveConfig& config,
                                       int* backend_calls = nullptr,
                                       std::uint64_t call_seed_base = 0);

/// Re-generates with the incorrect-answer hint (numeric entries only, in
/// insertion order); plain zero-shot retry when no numeric entries exist.
std::pair<std::string, ParsedAnswer> rectify(const std::string& question,
                                             const std::vector<ParsedAnswer>& incorrect_set,
                                             Backend& backend, const SolveConfig& config,
                                             int* backend_calls = nullptr,
                                             std::uint64_t call_seed_base = 0);

/// The full PRP loop: initialize, then verify-then-rectify up to K
/// iterations; final answer per the early-exit / last-rectified rule.
SolveTrace solve_prp(const std::string& question, const std::string& question_id,
                     Backend& backend, const SolveConfig& config);

/// The answer the run would have returned had K been `budget`, replayed
/// from the recorded trace. budget 0 is the initial answer; budgets past
/// the recorded K clamp to the final answer.
ParsedAnswer answer_at_budget(const SolveTrace& trace, int budget);

// Trace JSON (stable external shape).
nlohmann::json trace_to_json(const SolveTrace& trace);
SolveTrace trace_from_json(const nlohmann::json& j);

nlohmann::json parsed_answer_to_json(const ParsedAnswer& answer);
ParsedAnswer parsed_answer_from_json(const nlohmann::json& j);

}  // namespace prp
