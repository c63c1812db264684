#pragma once

#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

#include "tokenledger/money.hpp"

namespace tokenledger::testing {

/// Reference cost in micro-USD from exact rationals, written straight from
/// the per-Mtok formula, rounded half-to-even at the microdollar.
inline std::int64_t oracle_cost_micros(std::int64_t input, std::int64_t output, std::int64_t cache_read,
                                       std::int64_t cache_creation, Micros input_rate, Micros output_rate,
                                       Multiplier read_mult, Multiplier creation_mult) {
    using boost::multiprecision::cpp_int;
    using boost::multiprecision::cpp_rational;
    const cpp_rational million(1'000'000);
    const cpp_rational in_usd = cpp_rational(input_rate.count()) / million;  // USD per Mtok
    const cpp_rational out_usd = cpp_rational(output_rate.count()) / million;
    const cpp_rational read = cpp_rational(read_mult.ppm) / million;
    const cpp_rational creation = cpp_rational(creation_mult.ppm) / million;

    const cpp_rational usd = cpp_rational(input) / million * in_usd + cpp_rational(output) / million * out_usd +
                             cpp_rational(cache_read) / million * in_usd * read +
                             cpp_rational(cache_creation) / million * in_usd * creation;
    const cpp_rational micro_usd = usd * million;

    const cpp_int num = boost::multiprecision::numerator(micro_usd);
    const cpp_int den = boost::multiprecision::denominator(micro_usd);
    cpp_int q = num / den;
    const cpp_int r = num % den;
    if (2 * r > den || (2 * r == den && (q & 1) != 0)) ++q;
    return q.convert_to<std::int64_t>();
}

}  // namespace tokenledger::testing
