#include "tokenledger/money.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace tokenledger {

namespace {

std::string format_scaled(std::int64_t value, std::int64_t scale, int digits) {
    const bool negative = value < 0;
    const std::uint64_t magnitude =
        negative ? static_cast<std::uint64_t>(-(value + 1)) + 1 : static_cast<std::uint64_t>(value);
    const auto whole = magnitude / static_cast<std::uint64_t>(scale);
    const auto frac = magnitude % static_cast<std::uint64_t>(scale);

    std::string out = negative ? "-" : "";
    out += std::to_string(whole);
    if (digits > 0) {
        std::string frac_text = std::to_string(frac);
        out += '.';
        out.append(static_cast<std::size_t>(digits) - frac_text.size(), '0');
        out += frac_text;
    }
    return out;
}

}  // namespace

Micros Micros::from_usd(double usd) {
    const double scaled = usd * static_cast<double>(kPerUsd);
    return Micros{static_cast<std::int64_t>(std::nearbyint(scaled))};
}

std::optional<Micros> Micros::parse(std::string_view text) {
    if (text.empty()) {
        return std::nullopt;
    }
    bool negative = false;
    if (text.front() == '-' || text.front() == '+') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    const auto dot = text.find('.');
    const std::string_view whole_text = text.substr(0, dot);
    std::string_view frac_text = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (whole_text.empty() && frac_text.empty()) {
        return std::nullopt;
    }
    if (frac_text.size() > 6) {
        return std::nullopt;
    }

    std::int64_t whole = 0;
    if (!whole_text.empty()) {
        auto [ptr, ec] = std::from_chars(whole_text.data(), whole_text.data() + whole_text.size(), whole);
        if (ec != std::errc{} || ptr != whole_text.data() + whole_text.size()) {
            return std::nullopt;
        }
    }
    std::int64_t frac = 0;
    if (!frac_text.empty()) {
        auto [ptr, ec] = std::from_chars(frac_text.data(), frac_text.data() + frac_text.size(), frac);
        if (ec != std::errc{} || ptr != frac_text.data() + frac_text.size()) {
            return std::nullopt;
        }
        for (std::size_t i = frac_text.size(); i < 6; ++i) {
            frac *= 10;
        }
    }
    if (whole > (INT64_MAX - frac) / kPerUsd) {
        return std::nullopt;
    }
    const std::int64_t value = whole * kPerUsd + frac;
    return Micros{negative ? -value : value};
}

std::string Micros::to_decimal() const { return format_scaled(value_, kPerUsd, 6); }

std::string Micros::to_dollars() const {
    const std::int64_t cents = divide_half_even<std::int64_t>(value_, 10'000);
    std::string text = format_scaled(cents, 100, 2);
    if (text.front() == '-') {
        return "-$" + text.substr(1);
    }
    return "$" + text;
}

Multiplier Multiplier::from_double(double factor) {
    return Multiplier{static_cast<std::int64_t>(std::nearbyint(factor * 1'000'000.0))};
}

}  // namespace tokenledger
