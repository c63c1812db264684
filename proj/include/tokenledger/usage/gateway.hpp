#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tokenledger/pricing/registry.hpp"
#include "tokenledger/store/telemetry_store.hpp"
#include "tokenledger/usage/extraction.hpp"

namespace tokenledger::usage {

struct HttpRequest {
    std::string method = "POST";
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Thrown by a transport when no HTTP response was obtained.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Performs one HTTP exchange. Production uses make_http_transport(); tests
/// substitute recorded fixtures.
using Transport = std::function<HttpResponse(const HttpRequest&)>;

Transport make_http_transport(std::chrono::seconds timeout = std::chrono::seconds{120});

struct ProviderCredentials {
    std::string anthropic_api_key;
    std::string google_api_key;
    std::string ollama_base_url = "http://localhost:11434";
    std::string anthropic_base_url = "https://api.anthropic.com";
    std::string google_base_url = "https://generativelanguage.googleapis.com";
};

struct ChatOptions {
    std::string agent = "gateway";
    std::string operation = "chat";
    std::string feature = "chat";
    int max_tokens = 4096;
};

struct GatewayResult {
    std::string text;
    TokenUsage usage;
    std::int64_t latency_ms = 0;
    std::string provider;
    std::string model;
    std::string event_id;
};

/// Builds the provider request for a single-turn chat completion.
HttpRequest build_chat_request(Provider provider, const std::string& model, std::string_view prompt,
                               const ProviderCredentials& credentials, int max_tokens);

/// Pulls the assistant text out of a provider response body.
std::string extract_response_text(Provider provider, const nlohmann::json& body);

/// Minimal multi-provider chat client. Every call records exactly one
/// telemetry event: status ok with priced usage, or status error with the
/// failure text and zero cost.
class Gateway {
public:
    Gateway(store::TelemetryStore& store, pricing::PricingRegistry& registry, Transport transport,
            ProviderCredentials credentials, pricing::CacheMultipliers multipliers = {});

    /// Throws UpstreamError (after recording the error event) on transport
    /// failure, non-2xx status, undecodable body, or missing credentials.
    GatewayResult chat(Provider provider, const std::string& model, std::string_view prompt,
                       const ChatOptions& options = {});

private:
    store::TelemetryStore& store_;
    pricing::PricingRegistry& registry_;
    Transport transport_;
    ProviderCredentials credentials_;
    pricing::CacheMultipliers multipliers_;
};

}  // namespace tokenledger::usage
