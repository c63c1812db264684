#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tokenledger/store/database.hpp"
#include "tokenledger/time.hpp"
#include "tokenledger/usage/gateway.hpp"

namespace tokenledger::intelligence {

enum class Category { BugRisk, Style, Naming, Performance, Security, Testing, Documentation, Design, Nitpick };

inline constexpr std::array<Category, 9> kAllCategories{
    Category::BugRisk, Category::Style,         Category::Naming, Category::Performance, Category::Security,
    Category::Testing, Category::Documentation, Category::Design, Category::Nitpick,
};

inline constexpr std::string_view kUncategorized = "uncategorized";

std::string_view to_string(Category category);
std::optional<Category> parse_category(std::string_view name);

struct CategoryRule {
    Category category;
    std::vector<std::string> patterns;  // case-insensitive ECMAScript regex
    int priority = 0;                   // lower runs first
};

struct CommentClassification {
    std::string text;
    std::optional<Category> category;  // nullopt means uncategorized
    std::optional<std::string> matched_pattern;

    std::string_view label() const { return category ? to_string(*category) : kUncategorized; }
};

/// The nine-category keyword table. Rules are tried in priority order and the
/// first pattern hit decides the category.
class RuleTable {
public:
    /// Throws ConfigError unless all nine categories appear exactly once with
    /// unique priorities and compilable patterns.
    explicit RuleTable(std::vector<CategoryRule> rules);

    static RuleTable from_json(const nlohmann::json& doc);
    static RuleTable load(const std::filesystem::path& path);
    /// The table shipped in data/category_rules.json, compiled in.
    static const RuleTable& builtin();

    CommentClassification classify(std::string_view text) const;
    const std::vector<CategoryRule>& rules() const { return rules_; }

private:
    std::vector<CategoryRule> rules_;                 // sorted by priority
    std::vector<std::vector<std::regex>> compiled_;   // parallel to rules_
};

struct IntelligenceDigest {
    std::map<std::string, std::int64_t> distribution;  // category name (or "uncategorized") -> count
    std::vector<std::pair<std::string, std::int64_t>> top_patterns;
    std::optional<std::string> narrative;

    std::int64_t categorized_count() const;
    std::int64_t total_count() const;
};

/// Counts every category (zeros included) plus "uncategorized", and the
/// `top_n` most frequent matched patterns.
IntelligenceDigest build_digest(std::span<const CommentClassification> classified, std::size_t top_n = 10);

/// Throws ValidationError("digest", "nothing to summarize") when no category
/// has a nonzero count. Deterministic for equal digests.
std::string build_summary_prompt(const IntelligenceDigest& digest);

/// Raw review comments and generated narratives, kept in the main database.
class ReviewCommentStore {
public:
    ReviewCommentStore(store::Database& db, Clock clock) : db_(db), clock_(std::move(clock)) {}

    void add_comments(std::span<const std::string> bodies);
    std::vector<std::string> comments() const;

    void save_narrative(const std::string& narrative, const std::string& provider, const std::string& model,
                        const std::string& event_id);
    std::optional<std::string> latest_narrative() const;

private:
    store::Database& db_;
    Clock clock_;
};

/// Sends the digest prompt through the gateway, tagged as feature
/// "intelligence_summary", and returns the free-form narrative. Gateway
/// failures propagate as UpstreamError after the error event is recorded.
usage::GatewayResult generate_ai_summary(const IntelligenceDigest& digest, usage::Gateway& gateway,
                                         usage::Provider provider, const std::string& model);

}  // namespace tokenledger::intelligence
