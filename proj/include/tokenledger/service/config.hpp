#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "tokenledger/pricing/registry.hpp"
#include "tokenledger/usage/gateway.hpp"

namespace tokenledger::service {

struct ServiceConfig {
    std::string db_path = "tokenledger.db";
    std::filesystem::path registry_path = TOKENLEDGER_DEFAULT_REGISTRY;
    std::optional<std::filesystem::path> rules_path;  // builtin table when absent
    std::string host = "127.0.0.1";
    int port = 8080;
    std::chrono::seconds cache_ttl{60};
    pricing::CacheMultipliers multipliers;
    usage::ProviderCredentials credentials;
    std::optional<std::filesystem::path> static_dir;

    /// Throws ConfigError for a port outside [1, 65535] or a non-positive TTL.
    void validate() const;

    using EnvLookup = std::function<const char*(const char*)>;

    /// Reads TOKENLEDGER_DB, TOKENLEDGER_REGISTRY, TOKENLEDGER_RULES,
    /// TOKENLEDGER_HOST, TOKENLEDGER_PORT, TOKENLEDGER_CACHE_TTL,
    /// TOKENLEDGER_CACHE_READ_MULTIPLIER, TOKENLEDGER_CACHE_CREATION_MULTIPLIER,
    /// TOKENLEDGER_STATIC_DIR, ANTHROPIC_API_KEY, GOOGLE_API_KEY and
    /// OLLAMA_BASE_URL over the defaults. Malformed numbers throw ConfigError.
    static ServiceConfig from_env(const EnvLookup& lookup);
    static ServiceConfig from_env();
};

}  // namespace tokenledger::service
