#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tokenledger {

/// A USD amount held as an integer count of microdollars.
///
/// All persisted and aggregated costs use this type so sums are exact and
/// order-independent. Conversion to decimal text happens only at the edges
/// (JSON, reports, CLI).
class Micros {
public:
    static constexpr std::int64_t kPerUsd = 1'000'000;

    constexpr Micros() = default;
    constexpr explicit Micros(std::int64_t value) : value_(value) {}

    /// Rounds half-to-even at the microdollar. Intended for values read
    /// from JSON numbers such as per-Mtok rates.
    static Micros from_usd(double usd);

    /// Parses a plain decimal ("34.8", "-0.000001", "20"). More than six
    /// fractional digits are rejected rather than rounded.
    static std::optional<Micros> parse(std::string_view text);

    constexpr std::int64_t count() const { return value_; }
    double to_usd() const { return static_cast<double>(value_) / kPerUsd; }

    /// Fixed six-digit decimal, e.g. "34.800000".
    std::string to_decimal() const;

    /// "$34.80" style, rounded half-to-even at the cent.
    std::string to_dollars() const;

    constexpr Micros& operator+=(Micros other) {
        value_ += other.value_;
        return *this;
    }
    constexpr Micros& operator-=(Micros other) {
        value_ -= other.value_;
        return *this;
    }
    friend constexpr Micros operator+(Micros a, Micros b) { return Micros{a.value_ + b.value_}; }
    friend constexpr Micros operator-(Micros a, Micros b) { return Micros{a.value_ - b.value_}; }
    friend constexpr auto operator<=>(Micros, Micros) = default;

private:
    std::int64_t value_ = 0;
};

/// A non-negative scale factor in parts-per-million (0.1 == 100000).
struct Multiplier {
    std::int64_t ppm = 0;

    static Multiplier from_double(double factor);
    double to_double() const { return static_cast<double>(ppm) / 1'000'000.0; }
    friend constexpr bool operator==(Multiplier, Multiplier) = default;
};

/// Integer division rounding half-to-even. Requires denominator > 0.
template <typename Int>
constexpr Int divide_half_even(Int numerator, Int denominator) {
    Int quotient = numerator / denominator;
    Int remainder = numerator % denominator;
    if (remainder < 0) {
        remainder = -remainder;
    }
    const Int twice = remainder * 2;
    const Int step = numerator < 0 ? Int{-1} : Int{1};
    if (twice > denominator || (twice == denominator && quotient % 2 != 0)) {
        quotient += step;
    }
    return quotient;
}

}  // namespace tokenledger
