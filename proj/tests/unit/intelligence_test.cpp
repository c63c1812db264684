#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "test_support.hpp"
#include "tokenledger/analytics/cost_analytics.hpp"
#include "tokenledger/errors.hpp"
#include "tokenledger/intelligence/classifier.hpp"

namespace tokenledger::intelligence {
namespace {

using nlohmann::json;
using testing::FixtureTransport;
using testing::StoreHarness;

std::vector<std::string> fixture_comments() {
    std::ifstream in(testing::test_data_dir() / "review_comments.txt");
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

std::vector<CategoryRule> minimal_rules() {
    std::vector<CategoryRule> rules;
    int priority = 1;
    for (const auto c : kAllCategories) rules.push_back({c, {std::string(to_string(c))}, priority++});
    return rules;
}

TEST(Classifier, KnownExamples) {
    const auto& rules = RuleTable::builtin();
    EXPECT_EQ(rules.classify("possible null dereference here").label(), "bug_risk");
    EXPECT_EQ(rules.classify("rename this variable for clarity").label(), "naming");
    EXPECT_EQ(rules.classify("").label(), "uncategorized");
    EXPECT_EQ(rules.classify("LGTM").label(), "uncategorized");
}

TEST(Classifier, CaseInsensitiveAndRecordsPattern) {
    const auto c = RuleTable::builtin().classify("POSSIBLE NULL DEREFERENCE");
    ASSERT_TRUE(c.category);
    EXPECT_EQ(*c.category, Category::BugRisk);
    ASSERT_TRUE(c.matched_pattern);
    EXPECT_FALSE(c.matched_pattern->empty());
}

TEST(Classifier, PriorityDecidesOverlap) {
    auto rules = minimal_rules();
    rules[0].patterns = {"shared"};  // bug_risk, priority 1
    rules[1].patterns = {"shared"};  // style, priority 2
    EXPECT_EQ(RuleTable(rules).classify("a shared word").label(), "bug_risk");
    std::swap(rules[0].priority, rules[1].priority);
    EXPECT_EQ(RuleTable(rules).classify("a shared word").label(), "style");
}

TEST(Classifier, ShippedFileMatchesBuiltin) {
    const auto loaded = RuleTable::load(testing::shipped_rules_path());
    for (const auto& text : fixture_comments()) {
        EXPECT_EQ(loaded.classify(text).label(), RuleTable::builtin().classify(text).label()) << text;
    }
}

TEST(RuleTableValidation, RejectsMalformedTables) {
    EXPECT_NO_THROW(RuleTable{minimal_rules()});

    auto missing = minimal_rules();
    missing.pop_back();
    EXPECT_THROW(RuleTable{missing}, ConfigError);

    auto dup = minimal_rules();
    dup[1].category = dup[0].category;
    EXPECT_THROW(RuleTable{dup}, ConfigError);

    auto same_priority = minimal_rules();
    same_priority[2].priority = same_priority[3].priority;
    EXPECT_THROW(RuleTable{same_priority}, ConfigError);

    auto bad_regex = minimal_rules();
    bad_regex[4].patterns = {"(unclosed"};
    EXPECT_THROW(RuleTable{bad_regex}, ConfigError);

    auto empty = minimal_rules();
    empty[5].patterns.clear();
    EXPECT_THROW(RuleTable{empty}, ConfigError);

    EXPECT_THROW(RuleTable::from_json(json{{"rules", json::array({{{"category", "vibes"}, {"priority", 1},
                                                                    {"patterns", {"x"}}}})}}),
                 ConfigError);
}

TEST(Digest, CountsAreConserved) {
    const auto comments = fixture_comments();
    ASSERT_EQ(comments.size(), 60u);
    std::vector<CommentClassification> classified;
    for (const auto& c : comments) classified.push_back(RuleTable::builtin().classify(c));
    const auto digest = build_digest(classified);
    EXPECT_EQ(digest.total_count(), 60);
    EXPECT_EQ(digest.distribution.size(), kAllCategories.size() + 1);
    std::int64_t sum = 0;
    for (const auto& [_, n] : digest.distribution) sum += n;
    EXPECT_EQ(sum, 60);
    EXPECT_GT(digest.distribution.at("uncategorized"), 0);
    EXPECT_GT(digest.categorized_count(), 40);
    EXPECT_LE(digest.top_patterns.size(), 10u);
    for (std::size_t i = 1; i < digest.top_patterns.size(); ++i) {
        EXPECT_GE(digest.top_patterns[i - 1].second, digest.top_patterns[i].second);
    }
}

TEST(Digest, RandomSubsetsConserveCounts) {
    const auto comments = fixture_comments();
    std::mt19937 rng(9);
    for (int round = 0; round < 50; ++round) {
        std::vector<CommentClassification> classified;
        const auto n = rng() % 120;
        for (std::size_t i = 0; i < n; ++i) {
            classified.push_back(RuleTable::builtin().classify(comments[rng() % comments.size()]));
        }
        const auto digest = build_digest(classified);
        EXPECT_EQ(digest.total_count(), static_cast<std::int64_t>(n));
        std::int64_t pattern_hits = 0;
        for (const auto& c : classified) pattern_hits += c.category ? 1 : 0;
        EXPECT_EQ(digest.categorized_count(), pattern_hits);
    }
}

TEST(SummaryPrompt, ListsCounts) {
    IntelligenceDigest digest;
    for (const auto c : kAllCategories) digest.distribution[std::string(to_string(c))] = 0;
    digest.distribution["style"] = 10;
    digest.distribution["bug_risk"] = 3;
    digest.distribution["uncategorized"] = 2;
    digest.top_patterns = {{"\\bformat", 6}};
    const auto prompt = build_summary_prompt(digest);
    EXPECT_NE(prompt.find("style: 10"), std::string::npos);
    EXPECT_NE(prompt.find("bug_risk: 3"), std::string::npos);
    EXPECT_LT(prompt.find("style: 10"), prompt.find("bug_risk: 3"));
    EXPECT_EQ(prompt, build_summary_prompt(digest));
}

TEST(SummaryPrompt, EmptyDigestRejected) {
    IntelligenceDigest digest;
    digest.distribution["uncategorized"] = 4;
    try {
        build_summary_prompt(digest);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("nothing to summarize"), std::string::npos);
    }
    EXPECT_THROW(build_summary_prompt(IntelligenceDigest{}), ValidationError);
}

TEST(ReviewCommentStore, PersistsCommentsAndNarratives) {
    StoreHarness h;
    ReviewCommentStore store(h.db, h.clock.clock());
    EXPECT_TRUE(store.comments().empty());
    EXPECT_FALSE(store.latest_narrative());
    const std::vector<std::string> bodies{"first", "second"};
    store.add_comments(bodies);
    store.add_comments(std::vector<std::string>{"third"});
    EXPECT_EQ(store.comments(), (std::vector<std::string>{"first", "second", "third"}));
    store.save_narrative("old", "anthropic", "m", "e1");
    h.clock.advance(std::chrono::minutes(1));
    store.save_narrative("new", "anthropic", "m", "e2");
    EXPECT_EQ(store.latest_narrative(), "new");
}

TEST(AiSummary, RoundTripRecordsPricedEvent) {
    StoreHarness h;
    auto fixture = FixtureTransport::replying(200, testing::anthropic_body("Style dominates.", 1000, 500));
    usage::ProviderCredentials creds;
    creds.anthropic_api_key = "k";
    usage::Gateway gateway(h.store, h.registry, fixture.transport(), creds);

    std::vector<CommentClassification> classified;
    for (const auto& c : fixture_comments()) classified.push_back(RuleTable::builtin().classify(c));
    const auto result = generate_ai_summary(build_digest(classified), gateway, usage::Provider::Anthropic,
                                            "claude-haiku-4-5");
    EXPECT_EQ(result.text, "Style dominates.");
    ASSERT_EQ(fixture.requests().size(), 1u);
    EXPECT_NE(fixture.requests()[0].body.find("three to five paragraphs"), std::string::npos);

    const auto event = h.store.find_event(result.event_id);
    ASSERT_TRUE(event);
    EXPECT_EQ(event->feature, "intelligence_summary");
    EXPECT_EQ(event->cost, Micros{3500});

    const auto summary = analytics::CostAnalytics(h.store).cost_summary(Period::All);
    ASSERT_EQ(summary.by_feature.size(), 1u);
    EXPECT_EQ(summary.by_feature[0].key, "intelligence_summary");
    EXPECT_EQ(summary.by_feature[0].cost, Micros{3500});
}

TEST(AiSummary, TransportFailureRecordsErrorEvent) {
    StoreHarness h;
    auto fixture = FixtureTransport::failing("connection refused");
    usage::ProviderCredentials creds;
    creds.anthropic_api_key = "k";
    usage::Gateway gateway(h.store, h.registry, fixture.transport(), creds);
    IntelligenceDigest digest;
    digest.distribution["style"] = 1;
    EXPECT_THROW(generate_ai_summary(digest, gateway, usage::Provider::Anthropic, "claude-haiku-4-5"),
                 UpstreamError);
    const auto events = h.store.query_events({});
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0].status, store::EventStatus::Error);
    EXPECT_EQ(events[0].feature, "intelligence_summary");
    EXPECT_EQ(events[0].cost, Micros{0});
}

}  // namespace
}  // namespace tokenledger::intelligence
