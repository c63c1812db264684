#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "tokenledger/money.hpp"
#include "tokenledger/pricing/registry.hpp"
#include "tokenledger/store/telemetry_store.hpp"
#include "tokenledger/time.hpp"
#include "tokenledger/usage/token_usage.hpp"

namespace tokenledger::importer {

/// One assistant request with usage, read from a session transcript line.
struct SessionEntry {
    std::string session_id;
    std::string entry_uuid;  // line "uuid", else a content hash of the raw line
    std::string model;
    usage::TokenUsage usage;
    TimePoint timestamp;
    std::optional<Micros> recorded_cost;  // explicit "costUSD" on the line
};

/// Why a line produced no entry.
enum class LineSkip {
    NoUsage,    // valid JSON without message.usage (user turns, tool events)
    Malformed,  // not a JSON object, or usage counts unreadable
};

using ParsedLine = std::variant<SessionEntry, LineSkip>;

/// `fallback_timestamp` (file modification time) applies when the line has
/// no parseable "timestamp".
ParsedLine parse_session_line(std::string_view line, std::string_view file_identity, TimePoint fallback_timestamp);

std::string dedup_key_for(const SessionEntry& entry);

/// SHA-256 of the input as lowercase hex.
std::string sha256_hex(std::string_view data);

struct ImportResult {
    std::int64_t files_scanned = 0;
    std::int64_t lines_read = 0;
    std::int64_t events_imported = 0;
    std::int64_t duplicates_skipped = 0;
    std::int64_t lines_skipped_malformed = 0;

    friend bool operator==(const ImportResult&, const ImportResult&) = default;
};

/// "$HOME/.claude/projects".
std::filesystem::path default_claude_projects_root();

/// Imports per-request usage from "*.jsonl" transcripts under a root.
/// Only one import runs at a time; a concurrent call throws ConflictError.
class ClaudeCodeImporter {
public:
    ClaudeCodeImporter(store::TelemetryStore& store, pricing::PricingRegistry& registry,
                       pricing::CacheMultipliers multipliers = {});

    /// Throws Error when the root is missing or not a directory. Unreadable
    /// files and malformed lines are counted, never fatal. A dry run counts
    /// what would be imported and writes nothing.
    ImportResult run(const std::filesystem::path& root, bool dry_run);

    bool running() const { return running_.load(); }

private:
    store::TelemetryStore& store_;
    pricing::PricingRegistry& registry_;
    pricing::CacheMultipliers multipliers_;
    std::atomic<bool> running_{false};
};

}  // namespace tokenledger::importer
