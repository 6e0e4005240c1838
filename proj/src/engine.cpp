#include "prp/engine.hpp"

#include <stdexcept>

namespace prp {
namespace {

constexpr std::uint64_t kCallSeedTag = 0x5eedbfc0de1234abULL;

std::uint64_t default_seed_base(const SolveConfig& config, std::string_view question_id) {
    return config.rng_seed ^ fnv1a64(question_id) ^ kCallSeedTag;
}

std::string call_backend(Backend& backend, const PromptText& prompt, const SolveConfig& config,
                         std::uint64_t seed_base, int& calls) {
    CompletionRequest request;
    request.prompt = prompt.text;
    request.params = config.sampling;
    request.sample_seed = derive_seed(seed_base, static_cast<std::uint64_t>(calls));
    try {
        CompletionResult result = backend.complete(request);
        ++calls;
        return result.text;
    } catch (const BackendError& e) {
        throw BackendError(e.kind(),
                           std::string(e.what()) + "\nwhile completing prompt: " + prompt.text);
    }
}

// reasoning call followed by an answer-extraction call
std::pair<std::string, ParsedAnswer> reason_and_extract(Backend& backend,
                                                        const PromptText& prompt,
                                                        const SolveConfig& config,
                                                        std::uint64_t seed_base, int& calls) {
    std::string reasoning = call_backend(backend, prompt, config, seed_base, calls);
    std::string extraction = call_backend(
        backend, answer_extraction_prompt(reasoning.empty() ? " " : reasoning), config, seed_base,
        calls);
    return {std::move(reasoning), parse_answer_text(extraction)};
}

bool set_contains(const std::vector<ParsedAnswer>& set, const ParsedAnswer& answer) {
    for (const auto& existing : set) {
        if (answer.is_number() && existing.is_number() &&
            existing.value->within_tolerance(*answer.value))
            return true;
        if (!answer.is_number() && existing.kind == answer.kind) return true;
    }
    return false;
}

std::vector<ParsedAnswer> numeric_entries(const std::vector<ParsedAnswer>& set) {
    std::vector<ParsedAnswer> out;
    for (const auto& a : set)
        if (a.is_number()) out.push_back(a);
    return out;
}

VerificationOutcome verify_one_mask(const std::string& question, const NumeralSpan& span,
                                    const ParsedAnswer& answer, Backend& backend,
                                    const SolveConfig& config, std::uint64_t seed_base,
                                    int& calls) {
    std::string masked = mask_condition(question, span);
    PromptText veri_question = verification_question(masked, answer);
    auto [reasoning, predicted] =
        reason_and_extract(backend, reasoning_prompt(veri_question.text), config, seed_base, calls);
    (void)reasoning;
    VerificationOutcome outcome;
    outcome.masked_value = span.value;
    outcome.predicted = predicted;
    outcome.verification_question_text = veri_question.text;
    outcome.status = answers_match(predicted, span.value) ? VerificationStatus::Verified
                                                          : VerificationStatus::Refuted;
    return outcome;
}

}  // namespace

std::pair<std::string, ParsedAnswer> initialize(const std::string& question, Backend& backend,
                                                const SolveConfig& config, int* backend_calls,
                                                std::uint64_t call_seed_base) {
    int calls = backend_calls ? *backend_calls : 0;
    auto result =
        reason_and_extract(backend, reasoning_prompt(question), config, call_seed_base, calls);
    if (backend_calls) *backend_calls = calls;
    return result;
}

VerificationOutcome substitute_verify(const std::string& question, const ParsedAnswer& answer,
                                      RngStream& rng, Backend& backend, const SolveConfig& config,
                                      int* backend_calls, std::uint64_t call_seed_base) {
    auto spans = extract_numerals(question);
    if (!answer.is_number() || spans.empty()) {
        return VerificationOutcome{};  // Skipped; the loop treats it as a refutation
    }
    std::size_t pick = rng.next_index(spans.size());
    int calls = backend_calls ? *backend_calls : 0;
    auto outcome =
        verify_one_mask(question, spans[pick], answer, backend, config, call_seed_base, calls);
    if (backend_calls) *backend_calls = calls;
    return outcome;
}

VerificationOutcome enumeration_verify(const std::string& question, const ParsedAnswer& answer,
                                       Backend& backend, const SolveConfig& config,
                                       int* backend_calls, std::uint64_t call_seed_base) {
    auto spans = extract_numerals(question);
    if (!answer.is_number() || spans.empty()) return VerificationOutcome{};

    int calls = backend_calls ? *backend_calls : 0;
    VerificationOutcome last;
    for (const auto& span : spans) {
        last = verify_one_mask(question, span, answer, backend, config, call_seed_base, calls);
        if (last.status != VerificationStatus::Verified) break;  // first mismatch refutes
    }
    if (backend_calls) *backend_calls = calls;
    return last;
}

std::pair<std::string, ParsedAnswer> rectify(const std::string& question,
                                             const std::vector<ParsedAnswer>& incorrect_set,
                                             Backend& backend, const SolveConfig& config,
                                             int* backend_calls, std::uint64_t call_seed_base) {
    auto hints = numeric_entries(incorrect_set);
    PromptText prompt = hints.empty()
                            ? reasoning_prompt(question)  // nothing usable to hint with
                            : rectification_prompt(question, hints, config.hint_phrasing);
    int calls = backend_calls ? *backend_calls : 0;
    auto result = reason_and_extract(backend, prompt, config, call_seed_base, calls);
    if (backend_calls) *backend_calls = calls;
    return result;
}

SolveTrace solve_prp(const std::string& question, const std::string& question_id, Backend& backend,
                     const SolveConfig& config) {
    if (question.empty()) throw std::invalid_argument("solve_prp: empty question");
    if (config.max_iterations < 1) throw std::invalid_argument("solve_prp: K must be >= 1");

    SolveTrace trace;
    trace.question = question;
    trace.question_id = question_id;
    trace.max_iterations = config.max_iterations;

    std::uint64_t seed_base = default_seed_base(config, question_id);
    RngStream rng = mask_stream(config, question_id);
    int calls = 0;

    try {
        auto [reasoning, answer] = initialize(question, backend, config, &calls, seed_base);
        trace.initial_reasoning = std::move(reasoning);
        trace.initial_answer = answer;

        std::vector<ParsedAnswer> incorrect;  // C_i
        ParsedAnswer current = trace.initial_answer;

        for (int i = 1; i <= config.max_iterations; ++i) {
            IterationRecord record;
            record.index = i;
            record.answer_under_test = current;
            record.outcome =
                config.verification_mode == VerificationMode::Substitute
                    ? substitute_verify(question, current, rng, backend, config, &calls, seed_base)
                    : enumeration_verify(question, current, backend, config, &calls, seed_base);

            if (record.outcome.status == VerificationStatus::Verified) {
                record.incorrect_set_after = incorrect;
                trace.iterations.push_back(std::move(record));
                trace.final_answer = current;
                trace.termination = Termination::VerifiedAtIteration;
                trace.verified_iteration = i;
                trace.backend_calls = calls;
                return trace;
            }

            if (!set_contains(incorrect, current)) incorrect.push_back(current);
            record.incorrect_set_after = incorrect;

            auto [rect_reasoning, rect_answer] =
                rectify(question, incorrect, backend, config, &calls, seed_base);
            record.rectified_reasoning = std::move(rect_reasoning);
            record.rectified_answer = rect_answer;
            trace.iterations.push_back(std::move(record));
            current = rect_answer;
        }

        trace.final_answer = current;  // a_K, never itself verified
        trace.termination = Termination::BudgetExhausted;
        trace.backend_calls = calls;
        return trace;
    } catch (const BackendError& e) {
        trace.backend_calls = calls;
        throw SolveError(e.what(), std::move(trace));
    }
}

ParsedAnswer answer_at_budget(const SolveTrace& trace, int budget) {
    if (budget < 0) throw std::invalid_argument("answer_at_budget: negative budget");
    if (budget > trace.max_iterations) budget = trace.max_iterations;
    if (budget == 0) return trace.initial_answer;
    if (trace.termination == Termination::VerifiedAtIteration &&
        trace.verified_iteration <= budget) {
        return trace.final_answer;
    }
    // Otherwise the answer after min(budget, r) rectifications.
    int rectifications = 0;
    for (const auto& it : trace.iterations)
        if (it.rectified_answer) ++rectifications;
    int take = budget < rectifications ? budget : rectifications;
    if (take == 0) return trace.initial_answer;
    return *trace.iterations[static_cast<std::size_t>(take) - 1].rectified_answer;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json parsed_answer_to_json(const ParsedAnswer& answer) {
    nlohmann::json j;
    switch (answer.kind) {
        case AnswerKind::Number:
            j["kind"] = "number";
            j["value"] = answer.value->to_string();
            break;
        case AnswerKind::Unknown:
            j["kind"] = "unknown";
            break;
        case AnswerKind::Unparseable:
            j["kind"] = "unparseable";
            break;
    }
    j["raw_completion"] = answer.raw_completion;
    return j;
}

ParsedAnswer parsed_answer_from_json(const nlohmann::json& j) {
    std::string kind = j.at("kind").get<std::string>();
    std::string raw = j.value("raw_completion", "");
    if (kind == "number") {
        auto v = Decimal::parse(j.at("value").get<std::string>());
        if (!v) throw std::invalid_argument("parsed_answer_from_json: bad value");
        return ParsedAnswer::number(*v, std::move(raw));
    }
    if (kind == "unknown") return ParsedAnswer::unknown(std::move(raw));
    return ParsedAnswer::unparseable(std::move(raw));
}

namespace {

nlohmann::json outcome_to_json(const VerificationOutcome& o) {
    nlohmann::json j;
    switch (o.status) {
        case VerificationStatus::Verified: j["status"] = "verified"; break;
        case VerificationStatus::Refuted: j["status"] = "refuted"; break;
        case VerificationStatus::Skipped: j["status"] = "skipped"; break;
    }
    if (o.masked_value) j["masked_value"] = o.masked_value->to_string();
    if (o.predicted) j["predicted"] = parsed_answer_to_json(*o.predicted);
    j["verification_question_text"] = o.verification_question_text;
    return j;
}

VerificationOutcome outcome_from_json(const nlohmann::json& j) {
    VerificationOutcome o;
    std::string status = j.at("status").get<std::string>();
    o.status = status == "verified"   ? VerificationStatus::Verified
               : status == "refuted" ? VerificationStatus::Refuted
                                     : VerificationStatus::Skipped;
    if (j.contains("masked_value"))
        o.masked_value = *Decimal::parse(j["masked_value"].get<std::string>());
    if (j.contains("predicted")) o.predicted = parsed_answer_from_json(j["predicted"]);
    o.verification_question_text = j.value("verification_question_text", "");
    return o;
}

}  // namespace

nlohmann::json trace_to_json(const SolveTrace& trace) {
    nlohmann::json iterations = nlohmann::json::array();
    for (const auto& it : trace.iterations) {
        nlohmann::json record;
        record["index"] = it.index;
        record["answer_under_test"] = parsed_answer_to_json(it.answer_under_test);
        record["outcome"] = outcome_to_json(it.outcome);
        if (it.rectified_answer)
            record["rectified_answer"] = parsed_answer_to_json(*it.rectified_answer);
        record["rectified_reasoning"] = it.rectified_reasoning;
        nlohmann::json set = nlohmann::json::array();
        for (const auto& a : it.incorrect_set_after) set.push_back(parsed_answer_to_json(a));
        record["incorrect_set_after"] = set;
        iterations.push_back(record);
    }
    return nlohmann::json{
        {"question", trace.question},
        {"question_id", trace.question_id},
        {"max_iterations", trace.max_iterations},
        {"initial_reasoning", trace.initial_reasoning},
        {"initial_answer", parsed_answer_to_json(trace.initial_answer)},
        {"iterations", iterations},
        {"final_answer", parsed_answer_to_json(trace.final_answer)},
        {"termination", trace.termination == Termination::VerifiedAtIteration
                            ? "verified_at_iteration"
                            : "budget_exhausted"},
        {"verified_iteration", trace.verified_iteration},
        {"backend_calls", trace.backend_calls},
    };
}

SolveTrace trace_from_json(const nlohmann::json& j) {
    SolveTrace trace;
    trace.question = j.at("question").get<std::string>();
    trace.question_id = j.value("question_id", "");
    trace.max_iterations = j.at("max_iterations").get<int>();
    trace.initial_reasoning = j.value("initial_reasoning", "");
    trace.initial_answer = parsed_answer_from_json(j.at("initial_answer"));
    for (const auto& record : j.at("iterations")) {
        IterationRecord it;
        it.index = record.at("index").get<int>();
        it.answer_under_test = parsed_answer_from_json(record.at("answer_under_test"));
        it.outcome = outcome_from_json(record.at("outcome"));
        if (record.contains("rectified_answer"))
            it.rectified_answer = parsed_answer_from_json(record["rectified_answer"]);
        it.rectified_reasoning = record.value("rectified_reasoning", "");
        for (const auto& a : record.at("incorrect_set_after"))
            it.incorrect_set_after.push_back(parsed_answer_from_json(a));
        trace.iterations.push_back(std::move(it));
    }
    trace.final_answer = parsed_answer_from_json(j.at("final_answer"));
    trace.termination = j.at("termination").get<std::string>() == "verified_at_iteration"
                            ? Termination::VerifiedAtIteration
                            : Termination::BudgetExhausted;
    trace.verified_iteration = j.value("verified_iteration", 0);
    trace.backend_calls = j.value("backend_calls", 0);
    return trace;
}

}  // namespace prp
