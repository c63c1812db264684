#include <gtest/gtest.h>

#include <random>
#include <set>

#include "cost_oracle.hpp"
#include "test_support.hpp"
#include "tokenledger/errors.hpp"

namespace tokenledger::pricing {
namespace {

using testing::StoreHarness;
using testing::TempDir;
using usage::TokenUsage;

ModelPricing rates(std::string id, std::int64_t in_micros, std::int64_t out_micros) {
    return ModelPricing{id, "test", id, Micros{in_micros}, Micros{out_micros}, PricingSource::Builtin};
}

PricingResolution priced(ModelPricing p) {
    return PricingResolution{p.model_id, p, MatchKind::Exact};
}

TEST(Registry, ShipsTwentyFourModelsAcrossSixProviders) {
    StoreHarness h;
    const auto models = h.registry.list_models();
    std::set<std::string> providers;
    for (const auto& m : models) providers.insert(m.provider);
    EXPECT_GE(models.size(), 24u);
    EXPECT_EQ(providers, (std::set<std::string>{"anthropic", "deepseek", "google", "mistral", "ollama", "openai"}));
    for (const auto& m : models) {
        if (m.provider == "ollama") {
            EXPECT_EQ(m.input_cost_per_mtok, Micros{0});
            EXPECT_EQ(m.output_cost_per_mtok, Micros{0});
        }
    }
}

TEST(Registry, ResolvesExactFuzzyAndMiss) {
    StoreHarness h;
    const auto exact = h.registry.resolve("gpt-4o");
    EXPECT_EQ(exact.match_kind, MatchKind::Exact);
    EXPECT_EQ(exact.entry->model_id, "gpt-4o");

    const auto dated = h.registry.resolve("claude-sonnet-4-20250514");
    EXPECT_EQ(dated.match_kind, MatchKind::Fuzzy);
    EXPECT_EQ(dated.entry->model_id, "claude-sonnet-4");

    const auto upper = h.registry.resolve("GPT-4O");
    EXPECT_EQ(upper.match_kind, MatchKind::Exact);

    const auto miss = h.registry.resolve("totally-unknown-model-x");
    EXPECT_EQ(miss.match_kind, MatchKind::Unpriced);
    EXPECT_FALSE(miss.entry);

    EXPECT_EQ(h.registry.resolve("").match_kind, MatchKind::Unpriced);
}

TEST(Registry, FuzzyPrefersLongestThenLexicographic) {
    RegistrySnapshot snap({rates("gpt-4", 1, 1), rates("gpt-4o", 2, 2), rates("gpt-4o-mini", 3, 3)}, {}, {});
    EXPECT_EQ(snap.resolve("gpt-4o-mini-2024-07-18").entry->model_id, "gpt-4o-mini");
    EXPECT_EQ(snap.resolve("gpt-4o-2024-08-06").entry->model_id, "gpt-4o");
    // Requested name is a substring of registry ids: longest id containing it wins.
    EXPECT_EQ(snap.resolve("4o-m").entry->model_id, "gpt-4o-mini");

    RegistrySnapshot tie({rates("abc-x", 1, 1), rates("abc-a", 2, 2)}, {}, {});
    EXPECT_EQ(tie.resolve("abc").entry->model_id, "abc-a");
}

TEST(Registry, FuzzyResultIsInSubstringRelation) {
    StoreHarness h;
    for (const auto* name : {"claude-3-5-haiku-20241022", "models/gemini-2.5-pro-preview", "deepseek-chat-v3", "llama3"}) {
        const auto r = h.registry.resolve(name);
        ASSERT_EQ(r.match_kind, MatchKind::Fuzzy) << name;
        std::string req = name;
        std::string id = r.entry->model_id;
        EXPECT_TRUE(req.find(id) != std::string::npos || id.find(req) != std::string::npos) << name;
    }
}

TEST(Registry, ExactBeatsLongerFuzzyUnderRandomRegistries) {
    std::mt19937_64 rng(3);
    const std::string alphabet = "abcde-";
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ModelPricing> models;
        std::set<std::string> ids;
        const int n = 2 + static_cast<int>(rng() % 8);
        while (static_cast<int>(models.size()) < n) {
            std::string id;
            const int len = 1 + static_cast<int>(rng() % 6);
            for (int i = 0; i < len; ++i) id += alphabet[rng() % alphabet.size()];
            if (ids.insert(id).second) models.push_back(rates(id, 1, 1));
        }
        const auto target = models[rng() % models.size()].model_id;
        // Longer ids that contain the target make fuzzy candidates.
        if (ids.insert(target + "-long").second) models.push_back(rates(target + "-long", 9, 9));
        if (ids.insert("x" + target + "yz").second) models.push_back(rates("x" + target + "yz", 9, 9));
        RegistrySnapshot snap(models, {}, {});
        const auto r = snap.resolve(target);
        ASSERT_EQ(r.match_kind, MatchKind::Exact);
        EXPECT_EQ(r.entry->model_id, target);
        EXPECT_EQ(snap.resolve(target), r);  // deterministic
    }
}

TEST(Registry, OverrideShadowsAndDeleteRestores) {
    StoreHarness h;
    EXPECT_EQ(h.registry.resolve("gpt-4o").entry->input_cost_per_mtok, Micros{2'500'000});
    h.registry.upsert_override(ModelPricing{"gpt-4o", "openai", "GPT-4o", Micros{2'000'000}, Micros{8'000'000},
                                            PricingSource::Override});
    auto r = h.registry.resolve("gpt-4o");
    EXPECT_EQ(r.entry->input_cost_per_mtok, Micros{2'000'000});
    EXPECT_EQ(r.entry->output_cost_per_mtok, Micros{8'000'000});
    EXPECT_EQ(r.entry->source, PricingSource::Override);
    EXPECT_TRUE(h.registry.delete_override("gpt-4o"));
    r = h.registry.resolve("gpt-4o");
    EXPECT_EQ(r.entry->input_cost_per_mtok, Micros{2'500'000});
    EXPECT_EQ(r.entry->source, PricingSource::Builtin);
    EXPECT_FALSE(h.registry.delete_override("never-added"));
}

TEST(Registry, CustomModelAndValidation) {
    StoreHarness h;
    h.registry.upsert_override({"my-finetune", "", "", Micros{1'000'000}, Micros{4'000'000}, PricingSource::Override});
    const auto r = h.registry.resolve("my-finetune");
    EXPECT_EQ(r.match_kind, MatchKind::Exact);
    EXPECT_EQ(r.entry->source, PricingSource::Override);
    EXPECT_EQ(r.entry->display_name, "my-finetune");
    EXPECT_THROW(h.registry.upsert_override({"bad", "", "", Micros{-1}, Micros{0}, PricingSource::Override}),
                 ValidationError);
    EXPECT_THROW(h.registry.upsert_override({"", "", "", Micros{1}, Micros{0}, PricingSource::Override}),
                 ValidationError);
}

TEST(Registry, OverridesSurviveRestart) {
    TempDir dir;
    const auto db_path = (dir / "p.db").string();
    {
        store::Database db(db_path);
        PricingRegistry registry(testing::shipped_registry_path(), db, system_clock());
        registry.upsert_override({"my-finetune", "custom", "Mine", Micros{1'000'000}, Micros{4'000'000},
                                  PricingSource::Override});
    }
    store::Database db(db_path);
    PricingRegistry registry(testing::shipped_registry_path(), db, system_clock());
    const auto models = registry.list_models();
    const auto it = std::find_if(models.begin(), models.end(), [](const auto& m) { return m.model_id == "my-finetune"; });
    ASSERT_NE(it, models.end());
    EXPECT_EQ(it->source, PricingSource::Override);
    EXPECT_EQ(it->output_cost_per_mtok, Micros{4'000'000});
}

TEST(Registry, TtlReloadPicksUpBuiltinFileChanges) {
    TempDir dir;
    const auto file = dir / "registry.json";
    testing::write_file(file, R"({"m1": {"provider": "x", "input_cost_per_mtok": 1, "output_cost_per_mtok": 2}})");
    testing::ManualClock clock(testing::at("2026-01-01T00:00:00Z"));
    store::Database db(":memory:");
    PricingRegistry registry(file, db, clock.clock(), std::chrono::seconds{60});
    EXPECT_EQ(registry.resolve("m1").entry->input_cost_per_mtok, Micros{1'000'000});

    testing::write_file(file, R"({"m1": {"provider": "x", "input_cost_per_mtok": 5, "output_cost_per_mtok": 2}})");
    clock.advance(std::chrono::seconds{30});
    EXPECT_EQ(registry.resolve("m1").entry->input_cost_per_mtok, Micros{1'000'000});  // still fresh
    clock.advance(std::chrono::seconds{31});
    EXPECT_EQ(registry.resolve("m1").entry->input_cost_per_mtok, Micros{5'000'000});  // past TTL

    // A broken file keeps serving the last good snapshot.
    testing::write_file(file, "{ not json");
    clock.advance(std::chrono::seconds{61});
    EXPECT_EQ(registry.resolve("m1").entry->input_cost_per_mtok, Micros{5'000'000});
}

TEST(Registry, ParseErrorsCarryLocation) {
    try {
        parse_registry_document("{\n  \"a\": {\"input_cost_per_mtok\": 1,,}\n}", "reg.json");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("reg.json:2:"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_registry_document(R"({"a": {"input_cost_per_mtok": -1, "output_cost_per_mtok": 1}})", "r"),
                 ConfigError);
    EXPECT_THROW(load_registry("/nonexistent/registry.json", {}, {}), ConfigError);
}

TEST(Registry, ArrayFormAccepted) {
    const auto models = parse_registry_document(
        R"([{"model_id": "a", "provider": "p", "input_cost_per_mtok": 0.15, "output_cost_per_mtok": 0.6}])", "r");
    ASSERT_EQ(models.size(), 1u);
    EXPECT_EQ(models[0].input_cost_per_mtok, Micros{150'000});
    EXPECT_EQ(models[0].output_cost_per_mtok, Micros{600'000});
}

TEST(ComputeCost, WorkedExamples) {
    const auto sonnet = priced(rates("s", 3'000'000, 15'000'000));
    EXPECT_EQ(compute_cost(TokenUsage{1'000'000, 0, 0, 0, false}, sonnet), Micros{3'000'000});
    EXPECT_EQ(compute_cost(TokenUsage{250'000, 100'000, 0, 0, false}, sonnet), Micros{2'250'000});
    // 1M cache-read at 0.1x and 1M cache-creation at 1.25x of $3.
    EXPECT_EQ(compute_cost(TokenUsage{0, 0, 1'000'000, 0, false}, sonnet), Micros{300'000});
    EXPECT_EQ(compute_cost(TokenUsage{0, 0, 0, 1'000'000, false}, sonnet), Micros{3'750'000});
}

TEST(ComputeCost, UnpricedIsZero) {
    PricingResolution unpriced{"x", std::nullopt, MatchKind::Unpriced};
    EXPECT_EQ(compute_cost(TokenUsage{123, 456, 7, 8, false}, unpriced), Micros{0});
}

TEST(ComputeCost, ZeroUsageIsZero) {
    StoreHarness h;
    for (const auto& m : h.registry.list_models()) {
        EXPECT_EQ(compute_cost(TokenUsage{}, priced(m)), Micros{0}) << m.model_id;
    }
}

TEST(ComputeCost, MatchesRationalOracle) {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<std::int64_t> tokens(0, 50'000'000);
    std::uniform_int_distribution<std::int64_t> rate(0, 100'000'000);
    std::uniform_int_distribution<std::int64_t> mult(0, 3'000'000);
    for (int i = 0; i < 2000; ++i) {
        const TokenUsage u{tokens(rng), tokens(rng), tokens(rng), tokens(rng), false};
        const auto p = rates("m", rate(rng), rate(rng));
        const CacheMultipliers cm{Multiplier{mult(rng)}, Multiplier{mult(rng)}};
        const auto expected = testing::oracle_cost_micros(u.input_tokens, u.output_tokens, u.cache_read_tokens,
                                                          u.cache_creation_tokens, p.input_cost_per_mtok,
                                                          p.output_cost_per_mtok, cm.read, cm.creation);
        ASSERT_EQ(compute_cost(u, priced(p), cm).count(), expected) << "case " << i;
    }
}

TEST(ComputeCost, ExactValueIsLinear) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::int64_t> tokens(0, 10'000'000);
    for (int i = 0; i < 1000; ++i) {
        const TokenUsage a{tokens(rng), tokens(rng), tokens(rng), tokens(rng), false};
        const TokenUsage b{tokens(rng), tokens(rng), tokens(rng), tokens(rng), false};
        const TokenUsage sum{a.input_tokens + b.input_tokens, a.output_tokens + b.output_tokens,
                             a.cache_read_tokens + b.cache_read_tokens,
                             a.cache_creation_tokens + b.cache_creation_tokens, false};
        const auto p = rates("m", static_cast<std::int64_t>(rng() % 80'000'000), static_cast<std::int64_t>(rng() % 80'000'000));
        const CacheMultipliers cm;
        ASSERT_TRUE(exact_cost_attodollars(sum, p, cm) ==
                    exact_cost_attodollars(a, p, cm) + exact_cost_attodollars(b, p, cm));
    }
}

TEST(ComputeCost, RoundedCostIsLinearOnWholeMicroUsages) {
    // When each part costs a whole number of microdollars no rounding happens,
    // so the rounded cost is additive too.
    std::mt19937_64 rng(9);
    const auto p = priced(rates("m", 3'000'000, 15'000'000));
    for (int i = 0; i < 500; ++i) {
        const TokenUsage a{static_cast<std::int64_t>(rng() % 100'000) * 1'000, static_cast<std::int64_t>(rng() % 100'000) * 1'000, 0, 0, false};
        const TokenUsage b{static_cast<std::int64_t>(rng() % 100'000) * 1'000, static_cast<std::int64_t>(rng() % 100'000) * 1'000, 0, 0, false};
        const TokenUsage sum{a.input_tokens + b.input_tokens, a.output_tokens + b.output_tokens, 0, 0, false};
        ASSERT_EQ(compute_cost(sum, p), compute_cost(a, p) + compute_cost(b, p));
    }
}

}  // namespace
}  // namespace tokenledger::pricing
