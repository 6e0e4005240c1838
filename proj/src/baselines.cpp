#include "prp/baselines.hpp"

#include <stdexcept>

namespace prp {

ParsedAnswer solve_direct(const std::string& question, Backend& backend,
                          const BackendParams& params, int* backend_calls) {
    CompletionRequest request;
    request.prompt = direct_prompt(question).text;
    request.params = params;
    CompletionResult result = backend.complete(request);
    if (backend_calls) ++*backend_calls;
    return parse_answer_text(result.text);
}

std::pair<std::string, ParsedAnswer> solve_zero_shot_cot(const std::string& question,
                                                         Backend& backend,
                                                         const SolveConfig& config,
                                                         int* backend_calls) {
    return initialize(question, backend, config, backend_calls,
                      config.rng_seed ^ fnv1a64(question));
}

ParsedAnswer majority_vote(const std::vector<ParsedAnswer>& answers) {
    if (answers.empty()) throw std::invalid_argument("majority_vote: empty answer list");

    struct VoteClass {
        Decimal representative;  // first-seen member
        std::size_t count = 0;
        std::size_t first_index = 0;
    };
    std::vector<VoteClass> classes;
    for (std::size_t i = 0; i < answers.size(); ++i) {
        if (!answers[i].is_number()) continue;
        bool placed = false;
        for (auto& cls : classes) {
            if (answers[i].value->within_tolerance(cls.representative)) {
                ++cls.count;
                placed = true;
                break;
            }
        }
        if (!placed) classes.push_back({*answers[i].value, 1, i});
    }
    if (classes.empty()) return answers.front();

    const VoteClass* best = &classes.front();
    for (const auto& cls : classes) {
        if (cls.count > best->count ||
            (cls.count == best->count && cls.first_index < best->first_index)) {
            best = &cls;
        }
    }
    return ParsedAnswer::number(best->representative);
}

ParsedAnswer solve_self_consistency(const std::string& question, const std::string& question_id,
                                    Backend& backend, const SCConfig& sc_config,
                                    const BackendParams& base_params, int* backend_calls) {
    if (sc_config.samples < 1)
        throw std::invalid_argument("solve_self_consistency: M must be >= 1");

    SolveConfig config;
    config.sampling = base_params;
    config.sampling.temperature = sc_config.temperature;

    std::vector<ParsedAnswer> answers;
    answers.reserve(static_cast<std::size_t>(sc_config.samples));
    std::uint64_t base = sc_config.rng_seed ^ fnv1a64(question_id);
    for (int m = 0; m < sc_config.samples; ++m) {
        config.rng_seed = derive_seed(base, static_cast<std::uint64_t>(m));
        auto [reasoning, answer] = solve_zero_shot_cot(question, backend, config, backend_calls);
        (void)reasoning;
        answers.push_back(std::move(answer));
    }
    return majority_vote(answers);
}

}  // namespace prp
