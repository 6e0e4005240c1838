#include "prp/fixture.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "prp/engine.hpp"
#include "prp/numerics.hpp"

namespace prp {
namespace {

using nlohmann::json;

void add_pair(ScriptedFixture& script, const PromptText& prompt, const std::string& reasoning,
              const std::string& extraction_reply) {
    script.entries.push_back({MatchType::Equals, prompt.text, reasoning});
    script.entries.push_back(
        {MatchType::Equals, answer_extraction_prompt(reasoning).text, extraction_reply});
}

bool hint_contains(const std::vector<ParsedAnswer>& set, const Decimal& v) {
    for (const auto& a : set)
        if (a.is_number() && a.value->within_tolerance(v)) return true;
    return false;
}

}  // namespace

TranscriptFixture load_transcript_fixture(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fixture: " + path.string());
    json j = json::parse(in);

    TranscriptFixture fixture;
    fixture.name = j.value("name", path.stem().string());
    fixture.question = j.at("question").get<std::string>();
    fixture.question_id = j.value("question_id", fixture.name);
    auto gold = Decimal::parse(j.at("gold").get<std::string>());
    if (!gold) throw std::runtime_error("fixture " + fixture.name + ": bad gold answer");
    fixture.gold = *gold;
    fixture.hint_phrasing = j.value("hint_phrasing", "most_likely_not") == "likely_not"
                                ? HintPhrasing::LikelyNot
                                : HintPhrasing::MostLikelyNot;
    fixture.script.strict = j.value("strict", true);

    auto spans = extract_numerals(fixture.question);

    // Initialization pair.
    const json& initial = j.at("initial");
    std::string init_reasoning = initial.at("reasoning").get<std::string>();
    std::string init_extraction = initial.at("extraction").get<std::string>();
    add_pair(fixture.script, reasoning_prompt(fixture.question), init_reasoning, init_extraction);

    ParsedAnswer current = parse_answer_text(init_extraction);
    std::vector<ParsedAnswer> incorrect;

    for (const json& iteration : j.at("iterations")) {
        std::size_t mask_index = iteration.at("mask_index").get<std::size_t>();
        if (mask_index >= spans.size())
            throw std::runtime_error("fixture " + fixture.name + ": mask_index out of range");
        fixture.mask_indices.push_back(mask_index);

        std::string masked = mask_condition(fixture.question, spans[mask_index]);
        PromptText veri = verification_question(masked, current);
        add_pair(fixture.script, reasoning_prompt(veri.text),
                 iteration.at("verification_reasoning").get<std::string>(),
                 iteration.at("verification_extraction").get<std::string>());

        if (!iteration.contains("rectified_reasoning")) break;  // verified here

        if (current.is_number() && !hint_contains(incorrect, *current.value))
            incorrect.push_back(current);
        std::string rect_extraction = iteration.at("rectified_extraction").get<std::string>();
        add_pair(fixture.script,
                 rectification_prompt(fixture.question, incorrect, fixture.hint_phrasing),
                 iteration.at("rectified_reasoning").get<std::string>(), rect_extraction);
        current = parse_answer_text(rect_extraction);
    }

    if (j.contains("expected")) {
        const json& expected = j["expected"];
        if (expected.contains("final"))
            fixture.expected.final_answer = Decimal::parse(expected["final"].get<std::string>());
        for (const auto& v : expected.value("incorrect_set", json::array()))
            fixture.expected.incorrect_set.push_back(*Decimal::parse(v.get<std::string>()));
        fixture.expected.verified_iteration = expected.value("verified_iteration", 0);
        fixture.expected.backend_calls = expected.value("backend_calls", 0);
    }
    return fixture;
}

std::uint64_t find_replay_seed(const TranscriptFixture& fixture, std::uint64_t limit) {
    std::size_t n = extract_numerals(fixture.question).size();
    if (n == 0) throw std::runtime_error("find_replay_seed: question has no numerals");
    for (std::uint64_t seed = 0; seed < limit; ++seed) {
        RngStream stream = question_stream(seed, fixture.question_id);
        bool match = true;
        for (std::size_t want : fixture.mask_indices) {
            if (stream.next_index(n) != want) {
                match = false;
                break;
            }
        }
        if (match) return seed;
    }
    throw std::runtime_error("find_replay_seed: no seed below limit reproduces fixture " +
                             fixture.name);
}

}  // namespace prp
