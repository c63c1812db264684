#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "tokenledger/errors.hpp"
#include "tokenledger/usage/extraction.hpp"
#include "tokenledger/usage/gateway.hpp"

namespace tokenledger::usage {
namespace {

using nlohmann::json;
using testing::FixtureTransport;
using testing::StoreHarness;

ProviderCredentials creds() {
    ProviderCredentials c;
    c.anthropic_api_key = "test-anthropic";
    c.google_api_key = "test-google";
    c.ollama_base_url = "http://ollama.test:11434";
    return c;
}

TEST(ExtractUsage, AnthropicPassthrough) {
    const auto u = extract_usage(Provider::Anthropic, json{{"usage", {{"input_tokens", 1200}, {"output_tokens", 350}}}});
    ASSERT_TRUE(u);
    EXPECT_EQ(*u, (TokenUsage{1200, 350, 0, 0, false}));
    const auto cached = extract_usage(Provider::Anthropic, testing::anthropic_body("x", 10, 20, 4000, 300));
    EXPECT_EQ(*cached, (TokenUsage{10, 20, 4000, 300, false}));
}

TEST(ExtractUsage, GeminiPassthrough) {
    const auto u = extract_usage(
        Provider::Gemini, json{{"usageMetadata", {{"promptTokenCount", 90}, {"candidatesTokenCount", 40}}}});
    ASSERT_TRUE(u);
    EXPECT_EQ(*u, (TokenUsage{90, 40, 0, 0, false}));
}

TEST(ExtractUsage, OllamaPassthroughAndMissing) {
    EXPECT_EQ(*extract_usage(Provider::Ollama, json{{"prompt_eval_count", 11}, {"eval_count", 22}}),
              (TokenUsage{11, 22, 0, 0, false}));
    EXPECT_FALSE(extract_usage(Provider::Ollama, json{{"eval_count", 22}}));
}

TEST(ExtractUsage, RemovingUsageFlipsToMissing) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
        const auto a = static_cast<std::int64_t>(rng() % 100000);
        const auto b = static_cast<std::int64_t>(rng() % 100000);
        auto anth = testing::anthropic_body("t", a, b);
        auto gem = testing::gemini_body("t", a, b);
        auto oll = testing::ollama_body("t", a, b);
        EXPECT_EQ(*extract_usage(Provider::Anthropic, anth), (TokenUsage{a, b, 0, 0, false}));
        EXPECT_EQ(*extract_usage(Provider::Gemini, gem), (TokenUsage{a, b, 0, 0, false}));
        EXPECT_EQ(*extract_usage(Provider::Ollama, oll), (TokenUsage{a, b, 0, 0, false}));
        anth.erase("usage");
        gem.erase("usageMetadata");
        oll.erase("prompt_eval_count");
        EXPECT_FALSE(extract_usage(Provider::Anthropic, anth));
        EXPECT_FALSE(extract_usage(Provider::Gemini, gem));
        EXPECT_FALSE(extract_usage(Provider::Ollama, oll));
    }
}

TEST(ExtractUsage, RejectsNegativeOrNonIntegerCounts) {
    EXPECT_FALSE(extract_usage(Provider::Anthropic, json{{"usage", {{"input_tokens", -1}, {"output_tokens", 3}}}}));
    EXPECT_FALSE(extract_usage(Provider::Anthropic, json{{"usage", {{"input_tokens", "12"}, {"output_tokens", 3}}}}));
    EXPECT_FALSE(extract_usage(Provider::Gemini, json::array()));
}

TEST(EstimateUsage, CharacterHeuristic) {
    EXPECT_EQ(estimate_usage(2000), (TokenUsage{500, 500, 0, 0, true}));
    EXPECT_EQ(estimate_usage(0), (TokenUsage{0, 500, 0, 0, true}));
    EXPECT_EQ(estimate_usage(7), (TokenUsage{1, 500, 0, 0, true}));
    EXPECT_EQ(count_code_points("héllo ✓"), 7u);
}

TEST(Provider, ParsingAndVendorNames) {
    EXPECT_EQ(parse_provider("anthropic"), Provider::Anthropic);
    EXPECT_EQ(parse_provider("gemini"), Provider::Gemini);
    EXPECT_EQ(parse_provider("google"), Provider::Gemini);
    EXPECT_EQ(parse_provider("ollama"), Provider::Ollama);
    EXPECT_FALSE(parse_provider("openai"));
    EXPECT_EQ(vendor_name(Provider::Gemini), "google");
}

TEST(BuildChatRequest, ProviderShapes) {
    const auto a = build_chat_request(Provider::Anthropic, "claude-sonnet-4-5", "hi", creds(), 100);
    EXPECT_EQ(a.url, "https://api.anthropic.com/v1/messages");
    const auto ab = json::parse(a.body);
    EXPECT_EQ(ab["model"], "claude-sonnet-4-5");
    EXPECT_EQ(ab["max_tokens"], 100);
    EXPECT_EQ(ab["messages"][0]["content"], "hi");

    const auto g = build_chat_request(Provider::Gemini, "gemini-2.5-flash", "hi", creds(), 100);
    EXPECT_NE(g.url.find("/v1beta/models/gemini-2.5-flash:generateContent"), std::string::npos);

    const auto o = build_chat_request(Provider::Ollama, "llama3.1", "hi", creds(), 100);
    EXPECT_EQ(o.url, "http://ollama.test:11434/api/chat");
    EXPECT_EQ(json::parse(o.body)["stream"], false);
}

TEST(Gateway, RecordsRealUsageAndPricedCost) {
    StoreHarness h;
    auto fixture = FixtureTransport::replying(200, testing::anthropic_body("Looks good.", 1200, 350));
    Gateway gateway(h.store, h.registry, fixture.transport(), creds());
    const auto result = gateway.chat(Provider::Anthropic, "claude-sonnet-4-20250514", "Review this");
    EXPECT_EQ(result.text, "Looks good.");
    EXPECT_EQ(result.usage, (TokenUsage{1200, 350, 0, 0, false}));
    EXPECT_EQ(fixture.requests().size(), 1u);

    const auto events = h.store.query_events({});
    ASSERT_EQ(events.size(), 1u);
    const auto& e = events[0];
    EXPECT_EQ(e.id, result.event_id);
    EXPECT_EQ(e.status, store::EventStatus::Ok);
    EXPECT_EQ(e.provider, "anthropic");
    EXPECT_EQ(e.input_tokens, 1200);
    EXPECT_EQ(e.output_tokens, 350);
    EXPECT_EQ(e.cost, Micros{8'850});  // 1200*3/1e6 + 350*15/1e6
    EXPECT_FALSE(e.metadata.contains("estimated"));
    EXPECT_EQ(e.metadata["pricing_match"], "fuzzy");
    EXPECT_EQ(e.metadata["pricing_model_id"], "claude-sonnet-4");
    EXPECT_TRUE(e.latency_ms.has_value());
}

TEST(Gateway, FallsBackToHeuristicWhenUsageMissing) {
    StoreHarness h;
    auto body = testing::ollama_body("hello", 1, 1);
    body.erase("prompt_eval_count");
    auto fixture = FixtureTransport::replying(200, body);
    Gateway gateway(h.store, h.registry, fixture.transport(), creds());
    const std::string prompt(2000, 'x');
    const auto result = gateway.chat(Provider::Ollama, "llama3.1", prompt);
    EXPECT_EQ(result.usage, (TokenUsage{500, 500, 0, 0, true}));
    const auto e = h.store.query_events({}).at(0);
    EXPECT_EQ(e.metadata["estimated"], true);
    EXPECT_EQ(e.cost, Micros{0});
}

TEST(Gateway, TransportFailureRecordsErrorEvent) {
    StoreHarness h;
    auto fixture = FixtureTransport::failing("connection refused");
    Gateway gateway(h.store, h.registry, fixture.transport(), creds());
    try {
        gateway.chat(Provider::Gemini, "gemini-2.5-pro", "hi");
        FAIL();
    } catch (const UpstreamError& err) {
        const auto e = h.store.find_event(err.event_id());
        ASSERT_TRUE(e);
        EXPECT_EQ(e->status, store::EventStatus::Error);
        EXPECT_NE(e->error->find("connection refused"), std::string::npos);
        EXPECT_EQ(e->cost, Micros{0});
        EXPECT_EQ(e->provider, "google");
    }
    EXPECT_EQ(h.store.count_events(), 1);
}

TEST(Gateway, HttpErrorAndGarbageBodiesRecordOneEventEach) {
    StoreHarness h;
    int call = 0;
    FixtureTransport fixture([&](const HttpRequest&) {
        ++call;
        return call == 1 ? HttpResponse{529, R"({"error":"overloaded"})"} : HttpResponse{200, "<html>oops"};
    });
    Gateway gateway(h.store, h.registry, fixture.transport(), creds());
    EXPECT_THROW(gateway.chat(Provider::Anthropic, "claude-haiku-4-5", "a"), UpstreamError);
    EXPECT_THROW(gateway.chat(Provider::Anthropic, "claude-haiku-4-5", "b"), UpstreamError);
    const auto events = h.store.query_events({});
    ASSERT_EQ(events.size(), 2u);
    EXPECT_NE(events[0].error->find("529"), std::string::npos);
    EXPECT_NE(events[1].error->find("undecodable"), std::string::npos);
}

TEST(Gateway, MissingCredentialsFailWithoutCallingTransport) {
    StoreHarness h;
    auto fixture = FixtureTransport::replying(200, testing::anthropic_body("x", 1, 1));
    Gateway gateway(h.store, h.registry, fixture.transport(), ProviderCredentials{});
    EXPECT_THROW(gateway.chat(Provider::Anthropic, "claude-haiku-4-5", "a"), UpstreamError);
    EXPECT_TRUE(fixture.requests().empty());
    EXPECT_EQ(h.store.count_events(), 1);
}

TEST(Gateway, UnknownModelIsFlaggedUnpriced) {
    StoreHarness h;
    auto fixture = FixtureTransport::replying(200, testing::gemini_body("x", 10, 10));
    Gateway gateway(h.store, h.registry, fixture.transport(), creds());
    gateway.chat(Provider::Gemini, "totally-unknown-model-x", "hi");
    const auto e = h.store.query_events({}).at(0);
    EXPECT_EQ(e.metadata["unpriced"], true);
    EXPECT_EQ(e.cost, Micros{0});
}

}  // namespace
}  // namespace tokenledger::usage
