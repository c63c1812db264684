#include "tokenledger/usage/gateway.hpp"

#include <chrono>

#include "tokenledger/errors.hpp"

namespace tokenledger::usage {

namespace {

using nlohmann::json;

std::string trim_trailing_slash(std::string url) {
    while (!url.empty() && url.back() == '/') url.pop_back();
    return url;
}

std::string snippet(std::string_view body) {
    constexpr std::size_t kMax = 200;
    return std::string(body.substr(0, kMax));
}

std::string join_text_parts(const json& parts) {
    std::string text;
    if (!parts.is_array()) return text;
    for (const auto& part : parts) {
        if (part.is_object() && part.contains("text") && part["text"].is_string()) {
            text += part["text"].get<std::string>();
        }
    }
    return text;
}

}  // namespace

HttpRequest build_chat_request(Provider provider, const std::string& model, std::string_view prompt,
                               const ProviderCredentials& credentials, int max_tokens) {
    HttpRequest request;
    request.headers.emplace_back("content-type", "application/json");
    switch (provider) {
        case Provider::Anthropic:
            request.url = trim_trailing_slash(credentials.anthropic_base_url) + "/v1/messages";
            request.headers.emplace_back("x-api-key", credentials.anthropic_api_key);
            request.headers.emplace_back("anthropic-version", "2023-06-01");
            request.body = json{{"model", model},
                                {"max_tokens", max_tokens},
                                {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})}}
                               .dump();
            break;
        case Provider::Gemini:
            request.url = trim_trailing_slash(credentials.google_base_url) + "/v1beta/models/" + model +
                          ":generateContent";
            request.headers.emplace_back("x-goog-api-key", credentials.google_api_key);
            request.body =
                json{{"contents", json::array({json{{"role", "user"},
                                                    {"parts", json::array({json{{"text", prompt}}})}}})},
                     {"generationConfig", json{{"maxOutputTokens", max_tokens}}}}
                    .dump();
            break;
        case Provider::Ollama:
            request.url = trim_trailing_slash(credentials.ollama_base_url) + "/api/chat";
            request.body = json{{"model", model},
                                {"stream", false},
                                {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})}}
                               .dump();
            break;
    }
    return request;
}

std::string extract_response_text(Provider provider, const json& body) {
    if (!body.is_object()) return {};
    switch (provider) {
        case Provider::Anthropic:
            if (const auto it = body.find("content"); it != body.end()) return join_text_parts(*it);
            return {};
        case Provider::Gemini: {
            const auto candidates = body.find("candidates");
            if (candidates == body.end() || !candidates->is_array() || candidates->empty()) return {};
            const auto& first = (*candidates)[0];
            if (!first.is_object() || !first.contains("content") || !first["content"].is_object()) return {};
            const auto& content = first["content"];
            return content.contains("parts") ? join_text_parts(content["parts"]) : std::string{};
        }
        case Provider::Ollama: {
            const auto message = body.find("message");
            if (message == body.end() || !message->is_object()) return {};
            const auto content = message->find("content");
            return content != message->end() && content->is_string() ? content->get<std::string>() : std::string{};
        }
    }
    return {};
}

Gateway::Gateway(store::TelemetryStore& store, pricing::PricingRegistry& registry, Transport transport,
                 ProviderCredentials credentials, pricing::CacheMultipliers multipliers)
    : store_(store),
      registry_(registry),
      transport_(std::move(transport)),
      credentials_(std::move(credentials)),
      multipliers_(multipliers) {}

GatewayResult Gateway::chat(Provider provider, const std::string& model, std::string_view prompt,
                            const ChatOptions& options) {
    store::TelemetryEvent event;
    event.agent = options.agent;
    event.operation = options.operation;
    event.provider = std::string(vendor_name(provider));
    event.model = model;
    event.feature = options.feature;

    auto fail = [&](const std::string& message, std::optional<std::int64_t> latency) -> GatewayResult {
        event.status = store::EventStatus::Error;
        event.error = message;
        event.latency_ms = latency;
        event.set_tokens(0, 0);
        event.cost = Micros{0};
        const auto recorded = store_.record_event(event);
        throw UpstreamError(message, recorded.id);
    };

    if (provider == Provider::Anthropic && credentials_.anthropic_api_key.empty()) {
        return fail("missing credentials: ANTHROPIC_API_KEY is not set", std::nullopt);
    }
    if (provider == Provider::Gemini && credentials_.google_api_key.empty()) {
        return fail("missing credentials: GOOGLE_API_KEY is not set", std::nullopt);
    }

    const auto request = build_chat_request(provider, model, prompt, credentials_, options.max_tokens);
    const auto started = std::chrono::steady_clock::now();
    auto elapsed_ms = [&] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started)
            .count();
    };

    HttpResponse response;
    try {
        response = transport_(request);
    } catch (const std::exception& e) {
        return fail(std::string("transport error: ") + e.what(), elapsed_ms());
    }
    const std::int64_t latency = elapsed_ms();

    if (response.status < 200 || response.status >= 300) {
        return fail("HTTP " + std::to_string(response.status) + ": " + snippet(response.body), latency);
    }
    const json body = json::parse(response.body, nullptr, false);
    if (body.is_discarded()) {
        return fail("undecodable response body: " + snippet(response.body), latency);
    }

    auto usage = extract_usage(provider, body);
    if (!usage) {
        usage = estimate_usage(count_code_points(prompt));
        event.metadata["estimated"] = true;
    }
    const auto resolution = registry_.resolve(model);

    event.set_tokens(usage->input_tokens, usage->output_tokens);
    event.cost = pricing::compute_cost(*usage, resolution, multipliers_);
    event.latency_ms = latency;
    event.status = store::EventStatus::Ok;
    event.metadata["pricing_match"] = std::string(pricing::to_string(resolution.match_kind));
    if (resolution.entry) {
        event.metadata["pricing_model_id"] = resolution.entry->model_id;
    } else {
        event.metadata["unpriced"] = true;
    }
    if (usage->cache_read_tokens > 0) event.metadata["cache_read_tokens"] = usage->cache_read_tokens;
    if (usage->cache_creation_tokens > 0) event.metadata["cache_creation_tokens"] = usage->cache_creation_tokens;

    const auto recorded = store_.record_event(event);
    return GatewayResult{extract_response_text(provider, body), *usage, latency, event.provider, model,
                         recorded.id};
}

}  // namespace tokenledger::usage
