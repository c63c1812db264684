#include "tokenledger/usage/extraction.hpp"

namespace tokenledger::usage {

namespace {

using nlohmann::json;

std::optional<std::int64_t> count_field(const json& parent, std::string_view key) {
    if (!parent.is_object()) return std::nullopt;
    const auto it = parent.find(key);
    if (it == parent.end()) return std::nullopt;
    if (it->is_number_unsigned()) {
        const auto value = it->get<std::uint64_t>();
        if (value > static_cast<std::uint64_t>(INT64_MAX)) return std::nullopt;
        return static_cast<std::int64_t>(value);
    }
    if (it->is_number_integer()) {
        const auto value = it->get<std::int64_t>();
        if (value < 0) return std::nullopt;
        return value;
    }
    return std::nullopt;
}

const json* child(const json& parent, std::string_view key) {
    if (!parent.is_object()) return nullptr;
    const auto it = parent.find(key);
    return it == parent.end() ? nullptr : &*it;
}

}  // namespace

std::optional<Provider> parse_provider(std::string_view name) {
    if (name == "anthropic") return Provider::Anthropic;
    if (name == "gemini" || name == "google") return Provider::Gemini;
    if (name == "ollama") return Provider::Ollama;
    return std::nullopt;
}

std::string_view to_string(Provider provider) {
    switch (provider) {
        case Provider::Anthropic: return "anthropic";
        case Provider::Gemini: return "gemini";
        case Provider::Ollama: return "ollama";
    }
    return "anthropic";
}

std::string_view vendor_name(Provider provider) {
    return provider == Provider::Gemini ? "google" : to_string(provider);
}

std::optional<TokenUsage> extract_usage(Provider provider, const json& body) {
    switch (provider) {
        case Provider::Anthropic: {
            const json* usage = child(body, "usage");
            if (!usage) return std::nullopt;
            const auto input = count_field(*usage, "input_tokens");
            const auto output = count_field(*usage, "output_tokens");
            if (!input || !output) return std::nullopt;
            return TokenUsage{*input, *output, count_field(*usage, "cache_read_input_tokens").value_or(0),
                              count_field(*usage, "cache_creation_input_tokens").value_or(0), false};
        }
        case Provider::Gemini: {
            const json* meta = child(body, "usageMetadata");
            if (!meta) return std::nullopt;
            const auto prompt = count_field(*meta, "promptTokenCount");
            const auto candidates = count_field(*meta, "candidatesTokenCount");
            if (!prompt || !candidates) return std::nullopt;
            return TokenUsage{*prompt, *candidates, 0, 0, false};
        }
        case Provider::Ollama: {
            const auto prompt = count_field(body, "prompt_eval_count");
            const auto eval = count_field(body, "eval_count");
            if (!prompt || !eval) return std::nullopt;
            return TokenUsage{*prompt, *eval, 0, 0, false};
        }
    }
    return std::nullopt;
}

TokenUsage estimate_usage(std::uint64_t prompt_char_count) {
    return TokenUsage{static_cast<std::int64_t>(prompt_char_count / 4), kEstimatedOutputTokens, 0, 0, true};
}

std::uint64_t count_code_points(std::string_view utf8) {
    std::uint64_t count = 0;
    for (const char c : utf8) {
        // Continuation bytes are 10xxxxxx.
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            ++count;
        }
    }
    return count;
}

}  // namespace tokenledger::usage
