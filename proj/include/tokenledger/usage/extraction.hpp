#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

#include "tokenledger/usage/token_usage.hpp"

namespace tokenledger::usage {

enum class Provider { Anthropic, Gemini, Ollama };

std::optional<Provider> parse_provider(std::string_view name);
std::string_view to_string(Provider provider);

/// Vendor name used in telemetry and the pricing registry ("google" for Gemini).
std::string_view vendor_name(Provider provider);

/// Output tokens assumed when a response carries no usage.
inline constexpr std::int64_t kEstimatedOutputTokens = 500;

/// Reads the provider's usage fields. nullopt is the usage-missing signal: a
/// required field is absent or not a non-negative integer. Never guesses.
///   anthropic: usage.input_tokens, usage.output_tokens
///              (+ usage.cache_read_input_tokens, usage.cache_creation_input_tokens)
///   gemini:    usageMetadata.promptTokenCount, usageMetadata.candidatesTokenCount
///   ollama:    prompt_eval_count, eval_count
std::optional<TokenUsage> extract_usage(Provider provider, const nlohmann::json& body);

/// Character heuristic: input = chars / 4 (floor), output = 500, estimated.
TokenUsage estimate_usage(std::uint64_t prompt_char_count);

/// Number of Unicode code points in a UTF-8 string (counts non-continuation bytes).
std::uint64_t count_code_points(std::string_view utf8);

}  // namespace tokenledger::usage
