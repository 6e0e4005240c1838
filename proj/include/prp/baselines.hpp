#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prp/backend.hpp"
#include "prp/engine.hpp"
#include "prp/numerics.hpp"

namespace prp {

/// Self-consistency sampling setup (Table 4 ablation defaults).
struct SCConfig {
    int samples = 10;          // M
    double temperature = 0.7;
    std::uint64_t rng_seed = 0;
};

/// One completion on "{question} The answer is".
ParsedAnswer solve_direct(const std::string& question, Backend& backend,
                          const BackendParams& params = {}, int* backend_calls = nullptr);

/// Zero-Shot-CoT; identical to the engine's initialization.
std::pair<std::string, ParsedAnswer> solve_zero_shot_cot(const std::string& question,
                                                         Backend& backend,
                                                         const SolveConfig& config,
                                                         int* backend_calls = nullptr);

/// Majority vote over parsed answers: numeric answers group into
/// equivalence classes under the 1e-5 tolerance (chained via the class
/// representative, which is the first-seen member); largest class wins,
/// ties broken by earliest first occurrence. With no numeric answers the
/// first element is returned.
ParsedAnswer majority_vote(const std::vector<ParsedAnswer>& answers);

/// M independent Zero-Shot-CoT samples at the SC temperature, majority
/// voted. Per-sample seeds derive from (rng_seed, sample_index).
ParsedAnswer solve_self_consistency(const std::string& question, const std::string& question_id,
                                    Backend& backend, const SCConfig& sc_config,
                                    const BackendParams& base_params = {},
                                    int* backend_calls = nullptr);

}  // namespace prp
