#pragma once

#include <cstdint>

namespace tokenledger::usage {

/// Token counts for one request. Estimated usage never carries cache counts.
struct TokenUsage {
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::int64_t cache_read_tokens = 0;
    std::int64_t cache_creation_tokens = 0;
    bool estimated = false;

    bool valid() const {
        return input_tokens >= 0 && output_tokens >= 0 && cache_read_tokens >= 0 && cache_creation_tokens >= 0 &&
               (!estimated || (cache_read_tokens == 0 && cache_creation_tokens == 0));
    }

    friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

}  // namespace tokenledger::usage
