#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prp/decimal.hpp"

namespace prp {

/// A numeric literal located in question text.
struct NumeralSpan {
    std::string raw_text;  // as written, e.g. "19.5" or "1,319"
    Decimal value;         // separators stripped
    std::size_t start = 0;  // character offset, inclusive
    std::size_t end = 0;    // exclusive
};

enum class AnswerKind { Number, Unknown, Unparseable };

/// Normalized result of answer extraction.
struct ParsedAnswer {
    AnswerKind kind = AnswerKind::Unparseable;
    std::optional<Decimal> value;  // present iff kind == Number
    std::string raw_completion;

    static ParsedAnswer number(Decimal v, std::string raw = {}) {
        return {AnswerKind::Number, v, std::move(raw)};
    }
    static ParsedAnswer unknown(std::string raw = {}) {
        return {AnswerKind::Unknown, std::nullopt, std::move(raw)};
    }
    static ParsedAnswer unparseable(std::string raw = {}) {
        return {AnswerKind::Unparseable, std::nullopt, std::move(raw)};
    }

    bool is_number() const { return kind == AnswerKind::Number; }
};

/// Every maximal numeric literal in the question, left to right. Grammar:
/// digit run, optional comma thousands grouping (groups of exactly three),
/// optional single decimal point followed by digits. No sign, no scientific
/// notation.
std::vector<NumeralSpan> extract_numerals(std::string_view question_text);

/// Replaces the span's characters with the single token "X". The span must
/// have come from extract_numerals on this exact text.
std::string mask_condition(std::string_view question_text, const NumeralSpan& span);

/// Parses a model completion into an answer. A standalone word "Unknown"
/// (case-insensitive) wins over any numeral; otherwise a leading numeral,
/// else the last numeral anywhere in the text. A '-' directly attached to
/// the numeral is honored here (model answers can be negative), unlike in
/// question-text extraction.
ParsedAnswer parse_answer_text(std::string_view completion);

/// |a.value - b| < 1e-5, exact-decimal comparison. Non-numeric never matches.
bool answers_match(const ParsedAnswer& a, const Decimal& b);

/// 1 iff answers_match(final_answer, gold).
int correctness_indicator(const ParsedAnswer& final_answer, const Decimal& gold);

}  // namespace prp
