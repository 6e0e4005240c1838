#include "prp/numerics.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace prp {
namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Matches one maximal numeral starting at `i` (which must be a digit).
// Returns one past the end.
std::size_t scan_numeral(std::string_view text, std::size_t i) {
    std::size_t j = i;
    while (j < text.size() && is_digit(text[j])) ++j;
    // Comma groups: ",ddd" not followed by a fourth digit.
    while (j + 3 < text.size() && text[j] == ',' && is_digit(text[j + 1]) &&
           is_digit(text[j + 2]) && is_digit(text[j + 3]) &&
           (j + 4 >= text.size() || !is_digit(text[j + 4]))) {
        j += 4;
    }
    // Fraction part: '.' followed by at least one digit, at most once.
    if (j + 1 < text.size() && text[j] == '.' && is_digit(text[j + 1])) {
        j += 2;
        while (j < text.size() && is_digit(text[j])) ++j;
    }
    return j;
}

std::string strip_separators(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw)
        if (c != ',') out += c;
    return out;
}

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// Case-insensitive standalone-word search for "unknown".
bool contains_unknown_word(std::string_view text) {
    static constexpr std::string_view kWord = "unknown";
    for (std::size_t i = 0; i + kWord.size() <= text.size(); ++i) {
        bool match = true;
        for (std::size_t k = 0; k < kWord.size(); ++k) {
            if (std::tolower(static_cast<unsigned char>(text[i + k])) != kWord[k]) {
                match = false;
                break;
            }
        }
        if (!match) continue;
        bool left_ok = i == 0 || !is_word_char(text[i - 1]);
        std::size_t after = i + kWord.size();
        bool right_ok = after >= text.size() || !is_word_char(text[after]);
        if (left_ok && right_ok) return true;
    }
    return false;
}

struct SignedNumeral {
    Decimal value;
    std::size_t start;  // includes the sign when captured
    std::size_t end;
};

// All numerals in free text, honoring a directly attached leading '-'
// when it is not glued to a preceding word ("X-0.3" stays positive).
std::vector<SignedNumeral> scan_signed(std::string_view text) {
    std::vector<SignedNumeral> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_digit(text[i])) {
            ++i;
            continue;
        }
        std::size_t end = scan_numeral(text, i);
        std::size_t start = i;
        bool negative = false;
        if (i > 0 && text[i - 1] == '-') {
            char before = i >= 2 ? text[i - 2] : ' ';
            if (!is_word_char(before)) {
                negative = true;
                start = i - 1;
            }
        }
        auto v = Decimal::parse(strip_separators(text.substr(i, end - i)));
        if (v) {
            Decimal d = *v;
            if (negative) d = Decimal(-d.mantissa(), d.scale());
            out.push_back({d, start, end});
        }
        i = end;
    }
    return out;
}

}  // namespace

std::vector<NumeralSpan> extract_numerals(std::string_view question_text) {
    std::vector<NumeralSpan> spans;
    std::size_t i = 0;
    while (i < question_text.size()) {
        if (!is_digit(question_text[i])) {
            ++i;
            continue;
        }
        std::size_t end = scan_numeral(question_text, i);
        std::string raw(question_text.substr(i, end - i));
        auto value = Decimal::parse(strip_separators(raw));
        if (value) spans.push_back({std::move(raw), *value, i, end});
        i = end;
    }
    return spans;
}

std::string mask_condition(std::string_view question_text, const NumeralSpan& span) {
    if (span.end > question_text.size() || span.start >= span.end ||
        question_text.substr(span.start, span.end - span.start) != span.raw_text) {
        throw std::invalid_argument("mask_condition: span does not belong to this text");
    }
    std::string out(question_text.substr(0, span.start));
    out += 'X';
    out += question_text.substr(span.end);
    return out;
}

ParsedAnswer parse_answer_text(std::string_view completion) {
    std::string raw(completion);
    if (contains_unknown_word(completion)) return ParsedAnswer::unknown(std::move(raw));

    auto numerals = scan_signed(completion);
    if (numerals.empty()) return ParsedAnswer::unparseable(std::move(raw));

    // Leading numeral after trimming whitespace, punctuation and currency.
    std::size_t lead = 0;
    while (lead < completion.size()) {
        char c = completion[lead];
        if (std::isspace(static_cast<unsigned char>(c)) || c == '$' || c == '"' ||
            c == '\'' || c == '(' || c == '[' || c == ':' || c == '=') {
            ++lead;
        } else {
            break;
        }
    }
    for (const auto& n : numerals) {
        if (n.start == lead) return ParsedAnswer::number(n.value, std::move(raw));
    }
    return ParsedAnswer::number(numerals.back().value, std::move(raw));
}

bool answers_match(const ParsedAnswer& a, const Decimal& b) {
    return a.is_number() && a.value->within_tolerance(b);
}

int correctness_indicator(const ParsedAnswer& final_answer, const Decimal& gold) {
    return answers_match(final_answer, gold) ? 1 : 0;
}

}  // namespace prp
