#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>

namespace prp {

/// Exact decimal value: mantissa / 10^scale. Answers and question numerals
/// are kept in this form end to end; binary floating point only appears
/// inside tolerance comparisons, so "0.1" style values survive transcript
/// replay bit-exactly.
class Decimal {
public:
    Decimal() = default;
    Decimal(std::int64_t mantissa, int scale) : mantissa_(mantissa), scale_(scale) { normalize(); }

    /// Whole number convenience.
    static Decimal from_int(std::int64_t v) { return Decimal(v, 0); }

    /// Parses "123", "19.5", "-6", ".5". Thousands separators must already
    /// be stripped. Returns nullopt on anything else or on overflow.
    static std::optional<Decimal> parse(std::string_view text);

    std::int64_t mantissa() const { return mantissa_; }
    int scale() const { return scale_; }

    double to_double() const { return static_cast<double>(mantissa_) / std::pow(10.0, scale_); }

    /// Minimal rendering: no trailing zeros, no separators ("25", "0.1").
    std::string to_string() const;

    bool operator==(const Decimal& o) const {
        return mantissa_ == o.mantissa_ && scale_ == o.scale_;
    }
    bool operator!=(const Decimal& o) const { return !(*this == o); }

    /// |*this - other| < 1e-5, computed in exact integer arithmetic so the
    /// boundary is strict even where doubles would round.
    bool within_tolerance(const Decimal& other) const;

    bool is_zero() const { return mantissa_ == 0; }

private:
    void normalize() {
        while (scale_ > 0 && mantissa_ % 10 == 0) {
            mantissa_ /= 10;
            --scale_;
        }
        if (mantissa_ == 0) scale_ = 0;
    }

    std::int64_t mantissa_ = 0;
    int scale_ = 0;
};

inline std::optional<Decimal> Decimal::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    bool negative = false;
    std::size_t i = 0;
    if (text[0] == '-') {
        negative = true;
        i = 1;
    }
    std::int64_t mant = 0;
    int scale = 0;
    bool seen_dot = false;
    bool seen_digit = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_dot) return std::nullopt;
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9') return std::nullopt;
        if (mant > (INT64_MAX - 9) / 10) return std::nullopt;  // overflow
        mant = mant * 10 + (c - '0');
        if (seen_dot) ++scale;
        seen_digit = true;
    }
    if (!seen_digit) return std::nullopt;
    return Decimal(negative ? -mant : mant, scale);
}

inline std::string Decimal::to_string() const {
    std::string digits = std::to_string(mantissa_ < 0 ? -mantissa_ : mantissa_);
    while (static_cast<int>(digits.size()) <= scale_) digits.insert(digits.begin(), '0');
    std::string out;
    if (mantissa_ < 0) out += '-';
    out += digits.substr(0, digits.size() - scale_);
    if (scale_ > 0) {
        out += '.';
        out += digits.substr(digits.size() - scale_);
    }
    return out;
}

inline bool Decimal::within_tolerance(const Decimal& other) const {
    int s = scale_ > other.scale_ ? scale_ : other.scale_;
    if (s > 18) return std::fabs(to_double() - other.to_double()) < 1e-5;
    __int128 a = mantissa_;
    __int128 b = other.mantissa_;
    for (int i = scale_; i < s; ++i) a *= 10;
    for (int i = other.scale_; i < s; ++i) b *= 10;
    __int128 diff = a > b ? a - b : b - a;
    // diff / 10^s < 10^-5  <=>  diff * 10^5 < 10^s
    __int128 lhs = diff;
    for (int i = 0; i < 5; ++i) lhs *= 10;
    __int128 rhs = 1;
    for (int i = 0; i < s; ++i) rhs *= 10;
    return lhs < rhs;
}

}  // namespace prp
