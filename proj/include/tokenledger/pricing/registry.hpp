#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tokenledger/money.hpp"
#include "tokenledger/store/database.hpp"
#include "tokenledger/time.hpp"
#include "tokenledger/usage/token_usage.hpp"

namespace tokenledger::pricing {

enum class PricingSource { Builtin, Override };
enum class MatchKind { Exact, Fuzzy, Unpriced };

std::string_view to_string(PricingSource source);
std::string_view to_string(MatchKind kind);

/// Per-million-token USD rates for one model.
struct ModelPricing {
    std::string model_id;
    std::string provider;
    std::string display_name;
    Micros input_cost_per_mtok;
    Micros output_cost_per_mtok;
    PricingSource source = PricingSource::Builtin;

    friend bool operator==(const ModelPricing&, const ModelPricing&) = default;
};

struct PricingResolution {
    std::string requested_name;
    std::optional<ModelPricing> entry;
    MatchKind match_kind = MatchKind::Unpriced;

    bool priced() const { return entry.has_value(); }
    friend bool operator==(const PricingResolution&, const PricingResolution&) = default;
};

/// Cache tokens are billed as a multiple of the input rate.
struct CacheMultipliers {
    Multiplier read{100'000};        // 0.10
    Multiplier creation{1'250'000};  // 1.25
};

/// Cost of `usage` in units of 1e-18 USD, before any rounding. This is the
/// exact fixed-point value; it is additive over usages.
__int128 exact_cost_attodollars(const usage::TokenUsage& usage, const ModelPricing& rates,
                                const CacheMultipliers& multipliers);

/// Cost rounded half-to-even to the microdollar. Unpriced resolutions cost 0;
/// callers flag such events with metadata "unpriced": true.
Micros compute_cost(const usage::TokenUsage& usage, const PricingResolution& resolution,
                    const CacheMultipliers& multipliers = {});

/// Parses the builtin registry document: an object mapping model_id to
/// {provider, display_name, input_cost_per_mtok, output_cost_per_mtok}, or an
/// array of such objects each carrying model_id. Throws ConfigError with
/// "<source>:<line>:<column>: ..." diagnostics.
std::vector<ModelPricing> parse_registry_document(std::string_view text, std::string_view source_name);

/// Immutable merged view. Overrides shadow builtin entries with the same id.
class RegistrySnapshot {
public:
    RegistrySnapshot(std::vector<ModelPricing> builtin, std::vector<ModelPricing> overrides, TimePoint loaded_at);

    PricingResolution resolve(std::string_view model_name) const;
    const std::vector<ModelPricing>& models() const { return merged_; }
    TimePoint loaded_at() const { return loaded_at_; }

private:
    std::vector<ModelPricing> merged_;  // sorted by model_id
    std::vector<std::string> lowered_;  // parallel to merged_
    std::unordered_map<std::string, std::size_t> exact_;
    TimePoint loaded_at_;
};

RegistrySnapshot load_registry(const std::filesystem::path& builtin_path, std::vector<ModelPricing> overrides,
                               TimePoint now);

/// User overrides persisted in the model_pricing table.
class OverrideStore {
public:
    explicit OverrideStore(store::Database& db) : db_(db) {}

    /// Malformed rows (empty id, negative rates) are skipped with a warning.
    std::vector<ModelPricing> load() const;
    void upsert(const ModelPricing& pricing, TimePoint now);
    bool remove(std::string_view model_id);

private:
    store::Database& db_;
};

/// Builtin file plus persisted overrides, cached for `ttl`. A resolve after
/// the TTL has elapsed reloads before answering; nothing reloads in the
/// background. Mutations reload immediately.
class PricingRegistry {
public:
    PricingRegistry(std::filesystem::path builtin_path, store::Database& db, Clock clock,
                    std::chrono::milliseconds ttl = std::chrono::seconds{60});

    PricingResolution resolve(std::string_view model_name);
    std::vector<ModelPricing> list_models();

    /// Throws ValidationError on an empty id or negative rate.
    ModelPricing upsert_override(ModelPricing pricing);
    bool delete_override(std::string_view model_id);

    void reload();
    std::shared_ptr<const RegistrySnapshot> snapshot();

private:
    std::shared_ptr<const RegistrySnapshot> current() const;
    void publish(std::shared_ptr<const RegistrySnapshot> next);

    std::filesystem::path builtin_path_;
    OverrideStore overrides_;
    Clock clock_;
    std::chrono::milliseconds ttl_;
    mutable std::mutex snapshot_mutex_;
    std::shared_ptr<const RegistrySnapshot> snapshot_;
    std::mutex reload_mutex_;
};

}  // namespace tokenledger::pricing
