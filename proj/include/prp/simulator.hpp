#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "prp/backend.hpp"
#include "prp/decimal.hpp"

namespace prp {

struct SimulatorConfig {
    /// question text -> gold answer
    std::unordered_map<std::string, Decimal> gold_by_question;
    double p_gen = 1.0;  // probability a generation is correct
    double p_ver = 1.0;  // probability a verification reply behaves ideally
};

/// Stochastic oracle backend for studying the loop without a live model.
/// Incoming prompts are classified as generation / extraction /
/// verification using the canonical templates; replies embed the decided
/// answer as "The answer is N." so the extraction step round-trips.
///
/// Generations are correct with probability p_gen (else gold plus a
/// seed-determined nonzero offset from {+-1, +-2, x2}). Verification
/// replies behave like an ideal verifier with probability p_ver: the true
/// masked value when the supposed answer equals gold, otherwise a wrong
/// value or "Unknown". Everything is a pure function of sample_seed.
class SimulatorBackend : public Backend {
public:
    explicit SimulatorBackend(SimulatorConfig config);

    CompletionResult complete(const CompletionRequest& request) override;

private:
    struct MaskInfo {
        std::string question;  // original text
        Decimal masked_value;
    };

    SimulatorConfig config_;
    // normalized masked-question text -> which numeral was masked
    std::unordered_map<std::string, MaskInfo> masked_index_;
};

}  // namespace prp
