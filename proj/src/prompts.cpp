#include "prp/prompts.hpp"

#include <stdexcept>

namespace prp {

PromptText reasoning_prompt(std::string_view question) {
    if (question.empty()) throw std::invalid_argument("reasoning_prompt: empty question");
    std::string text = "Q: ";
    text += question;
    text += ". A: Let's think step by step";
    return {std::move(text), PromptKind::Reasoning};
}

PromptText answer_extraction_prompt(std::string_view reasoning) {
    if (reasoning.empty()) throw std::invalid_argument("answer_extraction_prompt: empty reasoning");
    std::string text(reasoning);
    text += " Therefore, the answer (expressed in Arabic numerals and without units) is:";
    return {std::move(text), PromptKind::AnswerExtraction};
}

PromptText verification_question(std::string_view masked_question, const ParsedAnswer& answer) {
    if (!answer.is_number())
        throw std::invalid_argument("verification_question: answer must be numeric");
    if (masked_question.find('X') == std::string_view::npos)
        throw std::invalid_argument("verification_question: masked question has no X token");
    std::string text(masked_question);
    text += " Suppose the answer is ";
    text += answer.value->to_string();
    text += ", what is X? (If X is irrelevant to the calculation process please answer Unknown)";
    return {std::move(text), PromptKind::Verification};
}

PromptText rectification_prompt(std::string_view question,
                                const std::vector<ParsedAnswer>& incorrect,
                                HintPhrasing phrasing) {
    if (question.empty()) throw std::invalid_argument("rectification_prompt: empty question");
    if (incorrect.empty())
        throw std::invalid_argument("rectification_prompt: empty incorrect-answer set");
    std::string hint;
    for (const auto& a : incorrect) {
        if (!a.is_number())
            throw std::invalid_argument("rectification_prompt: non-numeric incorrect answer");
        if (!hint.empty()) hint += ", ";
        hint += a.value->to_string();
    }
    std::string text = "Q: ";
    text += question;
    text += phrasing == HintPhrasing::LikelyNot ? " (The answer is likely not "
                                                : " (The answer is most likely not ";
    text += hint;
    text += ") A: Let's think step by step";
    return {std::move(text), PromptKind::Rectification};
}

PromptText direct_prompt(std::string_view question) {
    if (question.empty()) throw std::invalid_argument("direct_prompt: empty question");
    std::string text(question);
    text += " The answer is";
    return {std::move(text), PromptKind::Direct};
}

}  // namespace prp
