#include "tokenledger/pricing/registry.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "tokenledger/errors.hpp"

namespace tokenledger::pricing {

namespace {

using nlohmann::json;

std::string lowercase(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

struct TextPosition {
    std::size_t line = 1;
    std::size_t column = 1;
};

TextPosition position_of(std::string_view text, std::size_t offset) {
    TextPosition pos;
    offset = std::min(offset, text.size());
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++pos.line;
            pos.column = 1;
        } else {
            ++pos.column;
        }
    }
    return pos;
}

[[noreturn]] void fail_at(std::string_view source, std::string_view text, std::size_t offset,
                          const std::string& message) {
    const auto pos = position_of(text, offset);
    throw ConfigError(std::string(source) + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column) +
                      ": " + message);
}

Micros read_rate(const json& entry, const char* field, std::string_view source, std::string_view text,
                 std::size_t offset, const std::string& model_id) {
    const auto it = entry.find(field);
    if (it == entry.end() || !it->is_number()) {
        fail_at(source, text, offset, "model '" + model_id + "': '" + field + "' must be a number");
    }
    const double value = it->get<double>();
    if (value < 0) {
        fail_at(source, text, offset, "model '" + model_id + "': '" + field + "' must be non-negative");
    }
    return Micros::from_usd(value);
}

ModelPricing read_entry(const std::string& model_id, const json& entry, std::string_view source,
                        std::string_view text) {
    const std::size_t offset = text.find("\"" + model_id + "\"");
    if (model_id.empty()) {
        fail_at(source, text, offset, "model_id must be non-empty");
    }
    if (!entry.is_object()) {
        fail_at(source, text, offset, "model '" + model_id + "': entry must be an object");
    }
    ModelPricing pricing;
    pricing.model_id = model_id;
    const auto provider = entry.find("provider");
    if (provider == entry.end() || !provider->is_string() || provider->get_ref<const std::string&>().empty()) {
        fail_at(source, text, offset, "model '" + model_id + "': 'provider' must be a non-empty string");
    }
    pricing.provider = provider->get<std::string>();
    pricing.display_name = entry.value("display_name", model_id);
    pricing.input_cost_per_mtok = read_rate(entry, "input_cost_per_mtok", source, text, offset, model_id);
    pricing.output_cost_per_mtok = read_rate(entry, "output_cost_per_mtok", source, text, offset, model_id);
    pricing.source = PricingSource::Builtin;
    return pricing;
}

bool override_row_valid(const ModelPricing& p) {
    return !p.model_id.empty() && p.input_cost_per_mtok >= Micros{0} && p.output_cost_per_mtok >= Micros{0};
}

}  // namespace

std::string_view to_string(PricingSource source) { return source == PricingSource::Override ? "override" : "builtin"; }

std::string_view to_string(MatchKind kind) {
    switch (kind) {
        case MatchKind::Exact: return "exact";
        case MatchKind::Fuzzy: return "fuzzy";
        case MatchKind::Unpriced: return "unpriced";
    }
    return "unpriced";
}

__int128 exact_cost_attodollars(const usage::TokenUsage& usage, const ModelPricing& rates,
                                const CacheMultipliers& multipliers) {
    using i128 = __int128;
    const i128 in_rate = rates.input_cost_per_mtok.count();
    const i128 out_rate = rates.output_cost_per_mtok.count();
    // rate is micro-USD per 1e6 tokens, so tokens * rate is in 1e-12 USD.
    i128 total = (i128{usage.input_tokens} * in_rate + i128{usage.output_tokens} * out_rate) * 1'000'000;
    total += i128{usage.cache_read_tokens} * in_rate * multipliers.read.ppm;
    total += i128{usage.cache_creation_tokens} * in_rate * multipliers.creation.ppm;
    return total;
}

Micros compute_cost(const usage::TokenUsage& usage, const PricingResolution& resolution,
                    const CacheMultipliers& multipliers) {
    if (!resolution.entry) {
        return Micros{0};
    }
    const __int128 attos = exact_cost_attodollars(usage, *resolution.entry, multipliers);
    return Micros{static_cast<std::int64_t>(divide_half_even<__int128>(attos, 1'000'000'000'000))};
}

std::vector<ModelPricing> parse_registry_document(std::string_view text, std::string_view source_name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
        fail_at(source_name, text, offset, e.what());
    }

    std::vector<ModelPricing> entries;
    if (doc.is_object()) {
        for (const auto& [model_id, entry] : doc.items()) {
            entries.push_back(read_entry(model_id, entry, source_name, text));
        }
    } else if (doc.is_array()) {
        for (const auto& entry : doc) {
            const auto id = entry.is_object() ? entry.value("model_id", std::string{}) : std::string{};
            entries.push_back(read_entry(id, entry, source_name, text));
        }
    } else {
        fail_at(source_name, text, 0, "registry must be a JSON object or array");
    }

    std::vector<std::string> seen;
    for (const auto& entry : entries) {
        auto id = lowercase(entry.model_id);
        if (std::find(seen.begin(), seen.end(), id) != seen.end()) {
            fail_at(source_name, text, text.find("\"" + entry.model_id + "\""),
                    "duplicate model_id '" + entry.model_id + "'");
        }
        seen.push_back(std::move(id));
    }
    return entries;
}

RegistrySnapshot::RegistrySnapshot(std::vector<ModelPricing> builtin, std::vector<ModelPricing> overrides,
                                   TimePoint loaded_at)
    : loaded_at_(loaded_at) {
    std::unordered_map<std::string, ModelPricing> by_id;
    for (auto& entry : builtin) {
        entry.source = PricingSource::Builtin;
        auto key = lowercase(entry.model_id);
        by_id.insert_or_assign(std::move(key), std::move(entry));
    }
    for (auto& entry : overrides) {
        entry.source = PricingSource::Override;
        auto key = lowercase(entry.model_id);
        by_id.insert_or_assign(std::move(key), std::move(entry));
    }

    merged_.reserve(by_id.size());
    for (auto& [key, entry] : by_id) {
        merged_.push_back(std::move(entry));
    }
    std::sort(merged_.begin(), merged_.end(),
              [](const ModelPricing& a, const ModelPricing& b) { return a.model_id < b.model_id; });
    lowered_.reserve(merged_.size());
    for (std::size_t i = 0; i < merged_.size(); ++i) {
        lowered_.push_back(lowercase(merged_[i].model_id));
        exact_.emplace(lowered_.back(), i);
    }
}

PricingResolution RegistrySnapshot::resolve(std::string_view model_name) const {
    PricingResolution resolution{std::string(model_name), std::nullopt, MatchKind::Unpriced};
    const std::string wanted = lowercase(model_name);
    if (wanted.empty()) {
        return resolution;
    }
    if (const auto it = exact_.find(wanted); it != exact_.end()) {
        resolution.entry = merged_[it->second];
        resolution.match_kind = MatchKind::Exact;
        return resolution;
    }

    // Longest id in a substring relation with the request wins; ties go to
    // the lexicographically smaller id.
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < lowered_.size(); ++i) {
        const std::string& id = lowered_[i];
        const bool related = wanted.find(id) != std::string::npos || id.find(wanted) != std::string::npos;
        if (!related) continue;
        if (!best || id.size() > lowered_[*best].size() ||
            (id.size() == lowered_[*best].size() && id < lowered_[*best])) {
            best = i;
        }
    }
    if (best) {
        resolution.entry = merged_[*best];
        resolution.match_kind = MatchKind::Fuzzy;
    }
    return resolution;
}

RegistrySnapshot load_registry(const std::filesystem::path& builtin_path, std::vector<ModelPricing> overrides,
                               TimePoint now) {
    std::ifstream in(builtin_path, std::ios::binary);
    if (!in) {
        throw ConfigError(builtin_path.string() + ":0:0: cannot open model registry");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    auto builtin = parse_registry_document(buffer.str(), builtin_path.string());
    return RegistrySnapshot(std::move(builtin), std::move(overrides), now);
}

// --- OverrideStore -------------------------------------------------------------

std::vector<ModelPricing> OverrideStore::load() const {
    auto rows = db_.read([](store::Connection& conn) {
        store::Statement stmt(conn,
                              "SELECT model_id, provider, display_name, input_cost_micros, output_cost_micros "
                              "FROM model_pricing ORDER BY model_id");
        std::vector<ModelPricing> out;
        while (stmt.step()) {
            out.push_back(ModelPricing{stmt.column_text(0), stmt.column_text(1), stmt.column_text(2),
                                       Micros{stmt.column_int64(3)}, Micros{stmt.column_int64(4)},
                                       PricingSource::Override});
        }
        return out;
    });
    std::erase_if(rows, [](const ModelPricing& p) {
        if (override_row_valid(p)) return false;
        spdlog::warn("skipping malformed model_pricing override row '{}'", p.model_id);
        return true;
    });
    return rows;
}

void OverrideStore::upsert(const ModelPricing& pricing, TimePoint now) {
    db_.write([&](store::Connection& conn) {
        store::Statement stmt(conn,
                              "INSERT INTO model_pricing (model_id, provider, display_name, input_cost_micros, "
                              "output_cost_micros, updated_ms) VALUES (?1, ?2, ?3, ?4, ?5, ?6) "
                              "ON CONFLICT (model_id) DO UPDATE SET provider = excluded.provider, "
                              "display_name = excluded.display_name, input_cost_micros = excluded.input_cost_micros, "
                              "output_cost_micros = excluded.output_cost_micros, updated_ms = excluded.updated_ms");
        stmt.bind(1, pricing.model_id)
            .bind(2, pricing.provider)
            .bind(3, pricing.display_name)
            .bind(4, pricing.input_cost_per_mtok.count())
            .bind(5, pricing.output_cost_per_mtok.count())
            .bind(6, static_cast<std::int64_t>(now.time_since_epoch().count()));
        stmt.step();
    });
}

bool OverrideStore::remove(std::string_view model_id) {
    return db_.write([&](store::Connection& conn) {
        store::Statement stmt(conn, "DELETE FROM model_pricing WHERE model_id = ?1");
        stmt.bind(1, model_id);
        stmt.step();
        return conn.changes() > 0;
    });
}

// --- PricingRegistry -------------------------------------------------------------

PricingRegistry::PricingRegistry(std::filesystem::path builtin_path, store::Database& db, Clock clock,
                                 std::chrono::milliseconds ttl)
    : builtin_path_(std::move(builtin_path)), overrides_(db), clock_(std::move(clock)), ttl_(ttl) {
    if (ttl_ <= std::chrono::milliseconds::zero()) {
        throw ConfigError("registry cache TTL must be positive");
    }
    publish(std::make_shared<const RegistrySnapshot>(load_registry(builtin_path_, overrides_.load(), clock_())));
}

std::shared_ptr<const RegistrySnapshot> PricingRegistry::current() const {
    std::lock_guard lock(snapshot_mutex_);
    return snapshot_;
}

void PricingRegistry::publish(std::shared_ptr<const RegistrySnapshot> next) {
    std::lock_guard lock(snapshot_mutex_);
    snapshot_ = std::move(next);
}

void PricingRegistry::reload() {
    std::lock_guard lock(reload_mutex_);
    publish(std::make_shared<const RegistrySnapshot>(load_registry(builtin_path_, overrides_.load(), clock_())));
}

std::shared_ptr<const RegistrySnapshot> PricingRegistry::snapshot() {
    auto snap = current();
    if (clock_() - snap->loaded_at() < ttl_) {
        return snap;
    }
    try {
        reload();
    } catch (const Error& e) {
        // Keep answering from the last good view; the next call retries.
        spdlog::warn("model registry reload failed, serving previous snapshot: {}", e.what());
    }
    return current();
}

PricingResolution PricingRegistry::resolve(std::string_view model_name) { return snapshot()->resolve(model_name); }

std::vector<ModelPricing> PricingRegistry::list_models() { return snapshot()->models(); }

ModelPricing PricingRegistry::upsert_override(ModelPricing pricing) {
    if (pricing.model_id.empty()) {
        throw ValidationError("model_id", "model_id must be non-empty");
    }
    if (pricing.input_cost_per_mtok < Micros{0}) {
        throw ValidationError("input_cost_per_mtok", "input_cost_per_mtok must be non-negative");
    }
    if (pricing.output_cost_per_mtok < Micros{0}) {
        throw ValidationError("output_cost_per_mtok", "output_cost_per_mtok must be non-negative");
    }
    if (pricing.display_name.empty()) {
        pricing.display_name = pricing.model_id;
    }
    if (pricing.provider.empty()) {
        pricing.provider = "custom";
    }
    pricing.source = PricingSource::Override;
    overrides_.upsert(pricing, clock_());
    reload();
    return pricing;
}

bool PricingRegistry::delete_override(std::string_view model_id) {
    const bool removed = overrides_.remove(model_id);
    if (removed) {
        reload();
    }
    return removed;
}

}  // namespace tokenledger::pricing
