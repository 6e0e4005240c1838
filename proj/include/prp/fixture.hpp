#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "prp/backend.hpp"
#include "prp/decimal.hpp"
#include "prp/prompts.hpp"

namespace prp {

/// Expectations a transcript fixture states about its own replay.
struct FixtureExpectation {
    std::optional<Decimal> final_answer;
    std::vector<Decimal> incorrect_set;
    int verified_iteration = 0;  // 0 = budget exhausted
    int backend_calls = 0;
};

/// A replayable solve transcript: the question, the per-iteration
/// completions, and which numeral each verification masked. The loader
/// synthesizes exact-match script entries through the canonical prompt
/// builders, so a fixture file never spells out prompt text.
struct TranscriptFixture {
    std::string name;
    std::string question;
    std::string question_id;
    Decimal gold;
    HintPhrasing hint_phrasing = HintPhrasing::MostLikelyNot;
    std::vector<std::size_t> mask_indices;  // numeral index per iteration
    ScriptedFixture script;
    FixtureExpectation expected;
};

TranscriptFixture load_transcript_fixture(const std::filesystem::path& path);

/// Smallest global seed whose per-question mask stream reproduces the
/// fixture's mask-index sequence. Throws if none is found below the limit.
std::uint64_t find_replay_seed(const TranscriptFixture& fixture,
                               std::uint64_t limit = 10'000'000);

}  // namespace prp
