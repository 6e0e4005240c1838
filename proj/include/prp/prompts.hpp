#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "prp/numerics.hpp"

namespace prp {

enum class PromptKind { Reasoning, AnswerExtraction, Verification, Rectification, Direct };

/// The appendix transcripts write the hint as "most likely not" while the
/// method section writes "likely not"; both are supported and fixtures pick
/// the one they were transcribed with.
enum class HintPhrasing { LikelyNot, MostLikelyNot };

struct PromptText {
    std::string text;
    PromptKind kind;
};

/// "Q: {question}. A: Let's think step by step"
PromptText reasoning_prompt(std::string_view question);

/// "{reasoning} Therefore, the answer (expressed in Arabic numerals and
/// without units) is:"
PromptText answer_extraction_prompt(std::string_view reasoning);

/// "{masked_question} Suppose the answer is {answer}, what is X? (If X is
/// irrelevant to the calculation process please answer Unknown)". The answer
/// must be numeric; it renders in canonical decimal form.
PromptText verification_question(std::string_view masked_question, const ParsedAnswer& answer);

/// "Q: {question} (The answer is likely not {h}) A: Let's think step by step"
/// with {h} the incorrect answers joined ", " in insertion order.
PromptText rectification_prompt(std::string_view question,
                                const std::vector<ParsedAnswer>& incorrect,
                                HintPhrasing phrasing = HintPhrasing::LikelyNot);

/// "{question} The answer is"
PromptText direct_prompt(std::string_view question);

}  // namespace prp
