#include <stdexcept>

#include "doctest.h"
#include "prp/prompts.hpp"

using namespace prp;

TEST_CASE("reasoning prompt template") {
    auto p = reasoning_prompt("Q1?");
    CHECK(p.text == "Q: Q1?. A: Let's think step by step");
    CHECK(p.kind == PromptKind::Reasoning);
    CHECK_THROWS_AS(reasoning_prompt(""), std::invalid_argument);
}

TEST_CASE("answer extraction prompt template") {
    auto p = answer_extraction_prompt("Some chain of thought.");
    CHECK(p.text ==
          "Some chain of thought. Therefore, the answer (expressed in Arabic numerals and "
          "without units) is:");
    CHECK(p.kind == PromptKind::AnswerExtraction);
    CHECK_THROWS_AS(answer_extraction_prompt(""), std::invalid_argument);
}

TEST_CASE("verification question template") {
    auto answer = ParsedAnswer::number(*Decimal::parse("31"));
    auto p = verification_question("Haley had X music files and 42 video files.", answer);
    CHECK(p.text ==
          "Haley had X music files and 42 video files. Suppose the answer is 31, what is X? "
          "(If X is irrelevant to the calculation process please answer Unknown)");
    CHECK(p.kind == PromptKind::Verification);
}

TEST_CASE("verification question renders canonical decimals") {
    auto p = verification_question("total of $X.", ParsedAnswer::number(*Decimal::parse("34.50")));
    CHECK(p.text.find("Suppose the answer is 34.5,") != std::string::npos);
}

TEST_CASE("verification question contract") {
    auto num = ParsedAnswer::number(*Decimal::parse("1"));
    CHECK_THROWS_AS(verification_question("no masked token here", num), std::invalid_argument);
    CHECK_THROWS_AS(verification_question("has X token", ParsedAnswer::unknown()),
                    std::invalid_argument);
    CHECK_THROWS_AS(verification_question("", num), std::invalid_argument);
}

TEST_CASE("rectification prompt joins hints in insertion order") {
    std::vector<ParsedAnswer> c = {ParsedAnswer::number(*Decimal::parse("31")),
                                   ParsedAnswer::number(*Decimal::parse("47"))};
    auto p = rectification_prompt("How many files?", c, HintPhrasing::MostLikelyNot);
    CHECK(p.text ==
          "Q: How many files? (The answer is most likely not 31, 47) A: Let's think step by "
          "step");
    auto q = rectification_prompt("How many files?", {c[0]}, HintPhrasing::LikelyNot);
    CHECK(q.text == "Q: How many files? (The answer is likely not 31) A: Let's think step by step");
    CHECK(p.kind == PromptKind::Rectification);
}

TEST_CASE("rectification prompt requires hints") {
    CHECK_THROWS_AS(rectification_prompt("q", {}), std::invalid_argument);
    CHECK_THROWS_AS(rectification_prompt("", {ParsedAnswer::number(*Decimal::parse("1"))}),
                    std::invalid_argument);
}

TEST_CASE("direct prompt template") {
    auto p = direct_prompt("What is 2 plus 2?");
    CHECK(p.text == "What is 2 plus 2? The answer is");
    CHECK(p.kind == PromptKind::Direct);
    CHECK_THROWS_AS(direct_prompt(""), std::invalid_argument);
}

TEST_CASE("negative hints render with sign") {
    std::vector<ParsedAnswer> c = {ParsedAnswer::number(*Decimal::parse("-1")),
                                   ParsedAnswer::number(*Decimal::parse("1"))};
    auto p = rectification_prompt("How many more books?", c, HintPhrasing::MostLikelyNot);
    CHECK(p.text.find("(The answer is most likely not -1, 1)") != std::string::npos);
}
