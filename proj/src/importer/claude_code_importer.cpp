#include "tokenledger/importer/claude_code_importer.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "tokenledger/errors.hpp"

namespace tokenledger::importer {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Count field: absent -> 0, present but not a non-negative integer -> nullopt.
std::optional<std::int64_t> read_count(const json& usage, std::string_view key) {
    const auto it = usage.find(key);
    if (it == usage.end() || it->is_null()) return 0;
    if (it->is_number_unsigned()) {
        const auto value = it->get<std::uint64_t>();
        if (value > static_cast<std::uint64_t>(INT64_MAX)) return std::nullopt;
        return static_cast<std::int64_t>(value);
    }
    if (it->is_number_integer() && it->get<std::int64_t>() >= 0) return it->get<std::int64_t>();
    return std::nullopt;
}

TimePoint file_mtime(const fs::path& path) {
    std::error_code ec;
    const auto ftime = fs::last_write_time(path, ec);
    if (ec) return TimePoint{};
    const auto sys = std::chrono::file_clock::to_sys(ftime);
    return std::chrono::time_point_cast<std::chrono::milliseconds>(sys);
}

bool blank(std::string_view line) { return line.find_first_not_of(" \t\r\n") == std::string_view::npos; }

class RunningGuard {
public:
    explicit RunningGuard(std::atomic<bool>& flag) : flag_(flag) {
        bool expected = false;
        if (!flag_.compare_exchange_strong(expected, true)) {
            throw ConflictError("import already running");
        }
    }
    ~RunningGuard() { flag_.store(false); }
    RunningGuard(const RunningGuard&) = delete;
    RunningGuard& operator=(const RunningGuard&) = delete;

private:
    std::atomic<bool>& flag_;
};

}  // namespace

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0x0f];
    }
    return out;
}

ParsedLine parse_session_line(std::string_view line, std::string_view file_identity, TimePoint fallback_timestamp) {
    const json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        return LineSkip::Malformed;
    }
    const auto message = doc.find("message");
    if (message == doc.end() || !message->is_object()) {
        return LineSkip::NoUsage;
    }
    const auto usage = message->find("usage");
    if (usage == message->end() || !usage->is_object()) {
        return LineSkip::NoUsage;
    }

    const auto input = read_count(*usage, "input_tokens");
    const auto output = read_count(*usage, "output_tokens");
    const auto cache_read = read_count(*usage, "cache_read_input_tokens");
    const auto cache_creation = read_count(*usage, "cache_creation_input_tokens");
    if (!input || !output || !cache_read || !cache_creation) {
        return LineSkip::Malformed;
    }

    SessionEntry entry;
    entry.session_id = std::string(file_identity);
    entry.usage = usage::TokenUsage{*input, *output, *cache_read, *cache_creation, false};
    if (const auto model = message->find("model"); model != message->end() && model->is_string()) {
        entry.model = model->get<std::string>();
    }
    if (const auto uuid = doc.find("uuid"); uuid != doc.end() && uuid->is_string() && !uuid->get_ref<const std::string&>().empty()) {
        entry.entry_uuid = uuid->get<std::string>();
    } else {
        entry.entry_uuid = "sha256:" + sha256_hex(line);
    }
    entry.timestamp = fallback_timestamp;
    if (const auto ts = doc.find("timestamp"); ts != doc.end() && ts->is_string()) {
        if (const auto parsed = parse_iso8601(ts->get_ref<const std::string&>())) {
            entry.timestamp = *parsed;
        }
    }
    if (const auto cost = doc.find("costUSD"); cost != doc.end() && cost->is_number() && cost->get<double>() >= 0) {
        entry.recorded_cost = Micros::from_usd(cost->get<double>());
    }
    return entry;
}

std::string dedup_key_for(const SessionEntry& entry) { return "cc:" + entry.session_id + ":" + entry.entry_uuid; }

fs::path default_claude_projects_root() {
    const char* home = std::getenv("HOME");
    return fs::path(home ? home : ".") / ".claude" / "projects";
}

ClaudeCodeImporter::ClaudeCodeImporter(store::TelemetryStore& store, pricing::PricingRegistry& registry,
                                       pricing::CacheMultipliers multipliers)
    : store_(store), registry_(registry), multipliers_(multipliers) {}

ImportResult ClaudeCodeImporter::run(const fs::path& root, bool dry_run) {
    RunningGuard guard(running_);

    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw Error("import root is not a readable directory: " + root.string());
    }

    std::vector<fs::path> files;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) {
        throw Error("cannot read import root " + root.string() + ": " + ec.message());
    }
    for (const fs::recursive_directory_iterator end; it != end; it.increment(ec)) {
        if (ec) break;
        if (it->is_regular_file(ec) && it->path().extension() == ".jsonl") {
            files.push_back(it->path());
        }
    }
    std::sort(files.begin(), files.end());

    ImportResult result;
    std::unordered_set<std::string> seen_this_run;
    for (const auto& file : files) {
        ++result.files_scanned;
        const std::string session_id = file.lexically_relative(root).generic_string();
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            spdlog::warn("skipping unreadable transcript {}", file.string());
            ++result.lines_skipped_malformed;
            continue;
        }
        const TimePoint mtime = file_mtime(file);

        std::string line;
        while (std::getline(in, line)) {
            if (blank(line)) continue;
            ++result.lines_read;

            auto parsed = parse_session_line(line, session_id, mtime);
            if (const auto* skip = std::get_if<LineSkip>(&parsed)) {
                if (*skip == LineSkip::Malformed) ++result.lines_skipped_malformed;
                continue;
            }
            const auto& entry = std::get<SessionEntry>(parsed);
            const std::string key = dedup_key_for(entry);

            if (dry_run) {
                const bool duplicate = !seen_this_run.insert(key).second || store_.has_dedup_key(key);
                ++(duplicate ? result.duplicates_skipped : result.events_imported);
                continue;
            }

            store::TelemetryEvent event;
            event.timestamp = entry.timestamp;
            event.agent = "claude_code";
            event.operation = "session_request";
            event.provider = "anthropic";
            event.model = entry.model;
            event.set_tokens(entry.usage.input_tokens, entry.usage.output_tokens);
            event.feature = "import";
            event.metadata = json{{std::string(store::kDedupKey), key},
                                  {"source", "claude_code_transcript"},
                                  {"session_id", entry.session_id},
                                  {"entry_uuid", entry.entry_uuid},
                                  {"cache_read_tokens", entry.usage.cache_read_tokens},
                                  {"cache_creation_tokens", entry.usage.cache_creation_tokens}};
            if (entry.recorded_cost) {
                event.cost = *entry.recorded_cost;
                event.metadata["cost_source"] = "transcript";
            } else {
                const auto resolution = registry_.resolve(entry.model);
                event.cost = pricing::compute_cost(entry.usage, resolution, multipliers_);
                event.metadata["cost_source"] = "registry";
                event.metadata["pricing_match"] = std::string(pricing::to_string(resolution.match_kind));
                if (!resolution.priced()) event.metadata["unpriced"] = true;
            }

            const auto recorded = store_.record_event(std::move(event));
            ++(recorded.duplicate ? result.duplicates_skipped : result.events_imported);
        }
    }
    return result;
}

}  // namespace tokenledger::importer
