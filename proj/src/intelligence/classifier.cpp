#include "tokenledger/intelligence/classifier.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "tokenledger/errors.hpp"

namespace tokenledger::intelligence {

extern const std::string_view kBuiltinCategoryRules;

namespace {

constexpr std::array<std::pair<Category, std::string_view>, 9> kNames{{
    {Category::BugRisk, "bug_risk"},
    {Category::Style, "style"},
    {Category::Naming, "naming"},
    {Category::Performance, "performance"},
    {Category::Security, "security"},
    {Category::Testing, "testing"},
    {Category::Documentation, "documentation"},
    {Category::Design, "design"},
    {Category::Nitpick, "nitpick"},
}};

std::regex compile(const std::string& pattern, std::string_view category) {
    try {
        return std::regex(pattern, std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
    } catch (const std::regex_error& e) {
        throw ConfigError("category '" + std::string(category) + "': bad pattern '" + pattern + "': " + e.what());
    }
}

}  // namespace

std::string_view to_string(Category category) {
    for (const auto& [c, name] : kNames) {
        if (c == category) return name;
    }
    return kUncategorized;
}

std::optional<Category> parse_category(std::string_view name) {
    for (const auto& [c, n] : kNames) {
        if (n == name) return c;
    }
    return std::nullopt;
}

RuleTable::RuleTable(std::vector<CategoryRule> rules) : rules_(std::move(rules)) {
    std::set<Category> categories;
    std::set<int> priorities;
    for (const auto& rule : rules_) {
        const auto name = to_string(rule.category);
        if (!categories.insert(rule.category).second) {
            throw ConfigError("category '" + std::string(name) + "' defined twice");
        }
        if (!priorities.insert(rule.priority).second) {
            throw ConfigError("priority " + std::to_string(rule.priority) + " used twice");
        }
        if (rule.patterns.empty()) {
            throw ConfigError("category '" + std::string(name) + "' has no patterns");
        }
    }
    if (categories.size() != kAllCategories.size()) {
        throw ConfigError("rule table must define all " + std::to_string(kAllCategories.size()) + " categories");
    }
    std::stable_sort(rules_.begin(), rules_.end(),
                     [](const CategoryRule& a, const CategoryRule& b) { return a.priority < b.priority; });
    for (const auto& rule : rules_) {
        auto& compiled = compiled_.emplace_back();
        for (const auto& pattern : rule.patterns) {
            compiled.push_back(compile(pattern, to_string(rule.category)));
        }
    }
}

RuleTable RuleTable::from_json(const nlohmann::json& doc) {
    const auto rules_it = doc.find("rules");
    if (!doc.is_object() || rules_it == doc.end() || !rules_it->is_array()) {
        throw ConfigError("rule table must be an object with a 'rules' array");
    }
    std::vector<CategoryRule> rules;
    for (const auto& item : *rules_it) {
        if (!item.is_object() || !item.contains("category") || !item["category"].is_string() ||
            !item.contains("priority") || !item["priority"].is_number_integer() || !item.contains("patterns") ||
            !item["patterns"].is_array()) {
            throw ConfigError("each rule needs string 'category', integer 'priority' and array 'patterns'");
        }
        const auto& name = item["category"].get_ref<const std::string&>();
        const auto category = parse_category(name);
        if (!category) {
            throw ConfigError("unknown category '" + name + "'");
        }
        CategoryRule rule{*category, {}, item["priority"].get<int>()};
        for (const auto& p : item["patterns"]) {
            if (!p.is_string()) throw ConfigError("category '" + name + "': patterns must be strings");
            rule.patterns.push_back(p.get<std::string>());
        }
        rules.push_back(std::move(rule));
    }
    return RuleTable(std::move(rules));
}

RuleTable RuleTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open rule table " + path.string());
    }
    const auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
        throw ConfigError(path.string() + ": invalid JSON");
    }
    return from_json(doc);
}

const RuleTable& RuleTable::builtin() {
    static const RuleTable table = from_json(nlohmann::json::parse(kBuiltinCategoryRules));
    return table;
}

CommentClassification RuleTable::classify(std::string_view text) const {
    CommentClassification out{std::string(text), std::nullopt, std::nullopt};
    const auto begin = text.begin();
    const auto end = text.end();
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        for (std::size_t j = 0; j < compiled_[i].size(); ++j) {
            if (std::regex_search(begin, end, compiled_[i][j])) {
                out.category = rules_[i].category;
                out.matched_pattern = rules_[i].patterns[j];
                return out;
            }
        }
    }
    return out;
}

std::int64_t IntelligenceDigest::categorized_count() const {
    std::int64_t n = 0;
    for (const auto& [name, count] : distribution) {
        if (name != kUncategorized) n += count;
    }
    return n;
}

std::int64_t IntelligenceDigest::total_count() const {
    std::int64_t n = 0;
    for (const auto& [name, count] : distribution) n += count;
    return n;
}

IntelligenceDigest build_digest(std::span<const CommentClassification> classified, std::size_t top_n) {
    IntelligenceDigest digest;
    for (const auto c : kAllCategories) digest.distribution[std::string(to_string(c))] = 0;
    digest.distribution[std::string(kUncategorized)] = 0;

    std::map<std::string, std::int64_t> patterns;
    for (const auto& item : classified) {
        ++digest.distribution[std::string(item.label())];
        if (item.matched_pattern) ++patterns[*item.matched_pattern];
    }
    digest.top_patterns.assign(patterns.begin(), patterns.end());
    std::stable_sort(digest.top_patterns.begin(), digest.top_patterns.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (digest.top_patterns.size() > top_n) digest.top_patterns.resize(top_n);
    return digest;
}

std::string build_summary_prompt(const IntelligenceDigest& digest) {
    if (digest.categorized_count() == 0) {
        throw ValidationError("digest", "nothing to summarize");
    }
    std::vector<std::pair<std::string, std::int64_t>> rows(digest.distribution.begin(), digest.distribution.end());
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

    std::ostringstream out;
    out << "You are reviewing how a software team gives code review feedback.\n"
           "Human review comments were sorted into categories by keyword rules.\n\n"
           "Category counts:\n";
    for (const auto& [name, count] : rows) {
        out << "- " << name << ": " << count << "\n";
    }
    if (!digest.top_patterns.empty()) {
        out << "\nMost frequent matched patterns:\n";
        for (const auto& [pattern, count] : digest.top_patterns) {
            out << "- " << pattern << ": " << count << "\n";
        }
    }
    out << "\nWrite a short narrative (three to five paragraphs) describing where reviewer attention goes, "
           "which areas get little attention, and concrete suggestions for the team. "
           "Plain prose only.\n";
    return out.str();
}

void ReviewCommentStore::add_comments(std::span<const std::string> bodies) {
    const auto now_ms = clock_().time_since_epoch().count();
    db_.write([&](store::Connection& conn) {
        store::Statement stmt(conn, "INSERT INTO review_comments(body, created_ms) VALUES (?1, ?2)");
        for (const auto& body : bodies) {
            stmt.bind(1, std::string_view(body)).bind(2, std::int64_t{now_ms});
            stmt.step();
            stmt.reset();
        }
    });
}

std::vector<std::string> ReviewCommentStore::comments() const {
    return db_.read([](store::Connection& conn) {
        store::Statement stmt(conn, "SELECT body FROM review_comments ORDER BY id");
        std::vector<std::string> out;
        while (stmt.step()) out.push_back(stmt.column_text(0));
        return out;
    });
}

void ReviewCommentStore::save_narrative(const std::string& narrative, const std::string& provider,
                                        const std::string& model, const std::string& event_id) {
    const auto now_ms = clock_().time_since_epoch().count();
    db_.write([&](store::Connection& conn) {
        store::Statement stmt(conn,
                              "INSERT INTO intelligence_narratives(narrative, provider, model, event_id, created_ms) "
                              "VALUES (?1, ?2, ?3, ?4, ?5)");
        stmt.bind(1, std::string_view(narrative))
            .bind(2, std::string_view(provider))
            .bind(3, std::string_view(model))
            .bind(4, std::string_view(event_id))
            .bind(5, std::int64_t{now_ms});
        stmt.step();
    });
}

std::optional<std::string> ReviewCommentStore::latest_narrative() const {
    return db_.read([](store::Connection& conn) -> std::optional<std::string> {
        store::Statement stmt(conn, "SELECT narrative FROM intelligence_narratives ORDER BY id DESC LIMIT 1");
        if (stmt.step()) return stmt.column_text(0);
        return std::nullopt;
    });
}

usage::GatewayResult generate_ai_summary(const IntelligenceDigest& digest, usage::Gateway& gateway,
                                         usage::Provider provider, const std::string& model) {
    const auto prompt = build_summary_prompt(digest);
    usage::ChatOptions options;
    options.agent = "intelligence";
    options.operation = "summary";
    options.feature = "intelligence_summary";
    return gateway.chat(provider, model, prompt, options);
}

}  // namespace tokenledger::intelligence
