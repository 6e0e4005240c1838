#include "prp/simulator.hpp"

#include "prp/numerics.hpp"
#include "prp/rng.hpp"

namespace prp {
namespace {

constexpr std::string_view kExtractionSuffix =
    " Therefore, the answer (expressed in Arabic numerals and without units) is:";
constexpr std::string_view kReasoningPrefix = "Q: ";
constexpr std::string_view kReasoningSuffix = " A: Let's think step by step";
constexpr std::string_view kSupposeMarker = " Suppose the answer is ";
constexpr std::string_view kWhatIsX = ", what is X?";
constexpr std::string_view kDirectSuffix = " The answer is";
constexpr std::string_view kAnswerMarker = "The answer is ";
constexpr std::string_view kHintMarkerA = " (The answer is likely not ";
constexpr std::string_view kHintMarkerB = " (The answer is most likely not ";

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

[[noreturn]] void unclassifiable(const std::string& prompt) {
    throw BackendError(ErrorKind::Provider,
                       "simulator: unclassifiable prompt (template drift?): " + prompt);
}

std::int64_t pow10_int(int n) {
    std::int64_t v = 1;
    for (int i = 0; i < n; ++i) v *= 10;
    return v;
}

// Seed-determined wrong answer, guaranteed outside the 1e-5 tolerance.
Decimal wrong_value(const Decimal& gold, RngStream& rng) {
    std::int64_t unit = pow10_int(gold.scale());
    switch (rng.next_index(gold.is_zero() ? 4 : 5)) {
        case 0: return Decimal(gold.mantissa() + unit, gold.scale());
        case 1: return Decimal(gold.mantissa() - unit, gold.scale());
        case 2: return Decimal(gold.mantissa() + 2 * unit, gold.scale());
        case 3: return Decimal(gold.mantissa() - 2 * unit, gold.scale());
        default: return Decimal(gold.mantissa() * 2, gold.scale());  // x2, skipped for gold 0
    }
}

CompletionResult reply(std::string text) {
    CompletionResult result;
    result.text = std::move(text);
    return result;
}

}  // namespace

SimulatorBackend::SimulatorBackend(SimulatorConfig config) : config_(std::move(config)) {
    for (const auto& [question, gold] : config_.gold_by_question) {
        (void)gold;
        for (const auto& span : extract_numerals(question)) {
            masked_index_[normalize_prompt(mask_condition(question, span))] = {question,
                                                                               span.value};
        }
    }
}

CompletionResult SimulatorBackend::complete(const CompletionRequest& request) {
    const std::string& prompt = request.prompt;
    RngStream rng(request.sample_seed ^ fnv1a64(prompt));

    // Answer extraction: echo back the value the reasoning reply committed to.
    if (ends_with(prompt, kExtractionSuffix)) {
        std::string_view body(prompt);
        body.remove_suffix(kExtractionSuffix.size());
        auto pos = body.rfind(kAnswerMarker);
        if (pos == std::string_view::npos) unclassifiable(prompt);
        std::string_view tail = body.substr(pos + kAnswerMarker.size());
        auto dot = tail.find('.');
        // Keep a fractional part: a '.' followed by a digit is part of the number.
        while (dot != std::string_view::npos && dot + 1 < tail.size() &&
               tail[dot + 1] >= '0' && tail[dot + 1] <= '9') {
            dot = tail.find('.', dot + 1);
        }
        return reply(std::string(dot == std::string_view::npos ? tail : tail.substr(0, dot)));
    }

    // Direct prompt: one-shot generation.
    if (ends_with(prompt, kDirectSuffix)) {
        std::string question = prompt.substr(0, prompt.size() - kDirectSuffix.size());
        auto it = config_.gold_by_question.find(question);
        if (it == config_.gold_by_question.end()) unclassifiable(prompt);
        bool correct = rng.next_unit() < config_.p_gen;
        Decimal value = correct ? it->second : wrong_value(it->second, rng);
        return reply(" " + value.to_string() + ".");
    }

    // Everything else arrives wrapped as "Q: ... A: Let's think step by step".
    if (!starts_with(prompt, kReasoningPrefix) || !ends_with(prompt, kReasoningSuffix))
        unclassifiable(prompt);
    std::string_view inner(prompt);
    inner.remove_prefix(kReasoningPrefix.size());
    inner.remove_suffix(kReasoningSuffix.size());

    // Verification question: predict the masked value.
    if (auto suppose = inner.find(kSupposeMarker); suppose != std::string_view::npos) {
        std::string_view masked_question = inner.substr(0, suppose);
        std::string_view rest = inner.substr(suppose + kSupposeMarker.size());
        auto what = rest.find(kWhatIsX);
        if (what == std::string_view::npos) unclassifiable(prompt);
        auto supposed = Decimal::parse(rest.substr(0, what));
        if (!supposed) unclassifiable(prompt);

        auto it = masked_index_.find(normalize_prompt(masked_question));
        if (it == masked_index_.end()) unclassifiable(prompt);
        const MaskInfo& mask = it->second;
        Decimal gold = config_.gold_by_question.at(mask.question);

        bool answer_correct = supposed->within_tolerance(gold);
        bool ideal = rng.next_unit() < config_.p_ver;
        bool confirm = ideal == answer_correct;
        if (confirm) return reply("The answer is " + mask.masked_value.to_string() + ".");
        if (rng.next_index(2) == 0) return reply("The answer is Unknown.");
        return reply("The answer is " + wrong_value(mask.masked_value, rng).to_string() + ".");
    }

    // Generation: plain ("{q}.") or rectified ("{q} (The answer is ... not h)").
    std::string question;
    if (ends_with(inner, ")")) {
        auto hint = inner.rfind(kHintMarkerA);
        std::size_t marker_len = kHintMarkerA.size();
        if (hint == std::string_view::npos) {
            hint = inner.rfind(kHintMarkerB);
            marker_len = kHintMarkerB.size();
        }
        (void)marker_len;
        if (hint == std::string_view::npos) unclassifiable(prompt);
        question = std::string(inner.substr(0, hint));
    } else if (ends_with(inner, ".")) {
        question = std::string(inner.substr(0, inner.size() - 1));
    } else {
        unclassifiable(prompt);
    }

    auto it = config_.gold_by_question.find(question);
    if (it == config_.gold_by_question.end()) unclassifiable(prompt);
    bool correct = rng.next_unit() < config_.p_gen;
    Decimal value = correct ? it->second : wrong_value(it->second, rng);
    return reply("Working through the steps. The answer is " + value.to_string() + ".");
}

}  // namespace prp
