#include "tokenledger/service/config.hpp"

#include <charconv>
#include <cstdlib>

#include "tokenledger/errors.hpp"

namespace tokenledger::service {

namespace {

std::int64_t parse_int(const char* name, std::string_view text) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError(std::string(name) + ": expected an integer, got '" + std::string(text) + "'");
    }
    return value;
}

Multiplier parse_multiplier(const char* name, std::string_view text) {
    // Same fixed-point parse as money, then micro-units are ppm.
    const auto parsed = Micros::parse(text);
    if (!parsed || parsed->count() < 0) {
        throw ConfigError(std::string(name) + ": expected a non-negative decimal, got '" + std::string(text) + "'");
    }
    return Multiplier{parsed->count()};
}

}  // namespace

void ServiceConfig::validate() const {
    if (port < 1 || port > 65535) {
        throw ConfigError("port must be in [1, 65535], got " + std::to_string(port));
    }
    if (cache_ttl.count() <= 0) {
        throw ConfigError("cache TTL must be positive");
    }
}

ServiceConfig ServiceConfig::from_env(const EnvLookup& lookup) {
    ServiceConfig config;
    const auto get = [&](const char* name) -> std::optional<std::string> {
        const char* value = lookup(name);
        if (value == nullptr || *value == '\0') return std::nullopt;
        return std::string(value);
    };

    if (auto v = get("TOKENLEDGER_DB")) config.db_path = *v;
    if (auto v = get("TOKENLEDGER_REGISTRY")) config.registry_path = *v;
    if (auto v = get("TOKENLEDGER_RULES")) config.rules_path = *v;
    if (auto v = get("TOKENLEDGER_HOST")) config.host = *v;
    if (auto v = get("TOKENLEDGER_PORT")) config.port = static_cast<int>(parse_int("TOKENLEDGER_PORT", *v));
    if (auto v = get("TOKENLEDGER_CACHE_TTL")) {
        config.cache_ttl = std::chrono::seconds{parse_int("TOKENLEDGER_CACHE_TTL", *v)};
    }
    if (auto v = get("TOKENLEDGER_CACHE_READ_MULTIPLIER")) {
        config.multipliers.read = parse_multiplier("TOKENLEDGER_CACHE_READ_MULTIPLIER", *v);
    }
    if (auto v = get("TOKENLEDGER_CACHE_CREATION_MULTIPLIER")) {
        config.multipliers.creation = parse_multiplier("TOKENLEDGER_CACHE_CREATION_MULTIPLIER", *v);
    }
    if (auto v = get("TOKENLEDGER_STATIC_DIR")) config.static_dir = *v;
    if (auto v = get("ANTHROPIC_API_KEY")) config.credentials.anthropic_api_key = *v;
    if (auto v = get("GOOGLE_API_KEY")) config.credentials.google_api_key = *v;
    if (auto v = get("OLLAMA_BASE_URL")) config.credentials.ollama_base_url = *v;
    config.validate();
    return config;
}

ServiceConfig ServiceConfig::from_env() {
    return from_env([](const char* name) { return std::getenv(name); });
}

}  // namespace tokenledger::service
