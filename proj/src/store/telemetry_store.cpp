#include "tokenledger/store/telemetry_store.hpp"

#include <array>
#include <cstdio>
#include <random>

#include "tokenledger/errors.hpp"

namespace tokenledger::store {

namespace {

constexpr std::string_view kSelectColumns =
    "SELECT id, ts_ms, agent, operation, provider, model, input_tokens, output_tokens, total_tokens, "
    "cost_micros, latency_ms, feature, status, error, metadata FROM ai_telemetry";

std::string new_event_id() {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    std::array<std::uint64_t, 2> words{rng(), rng()};
    // RFC 4122 version 4 / variant 1 bits.
    words[0] = (words[0] & 0xffffffffffff0fffULL) | 0x0000000000004000ULL;
    words[1] = (words[1] & 0x3fffffffffffffffULL) | 0x8000000000000000ULL;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%08llx-%04llx-%04llx-%04llx-%012llx",
                  static_cast<unsigned long long>(words[0] >> 32),
                  static_cast<unsigned long long>((words[0] >> 16) & 0xffff),
                  static_cast<unsigned long long>(words[0] & 0xffff),
                  static_cast<unsigned long long>(words[1] >> 48),
                  static_cast<unsigned long long>(words[1] & 0xffffffffffffULL));
    return buf;
}

TelemetryEvent read_row(const Statement& stmt) {
    TelemetryEvent event;
    event.id = stmt.column_text(0);
    event.timestamp = TimePoint{std::chrono::milliseconds{stmt.column_int64(1)}};
    event.agent = stmt.column_text(2);
    event.operation = stmt.column_text(3);
    event.provider = stmt.column_text(4);
    event.model = stmt.column_text(5);
    event.input_tokens = stmt.column_int64(6);
    event.output_tokens = stmt.column_int64(7);
    event.total_tokens = stmt.column_int64(8);
    event.cost = Micros{stmt.column_int64(9)};
    event.latency_ms = stmt.column_optional_int64(10);
    event.feature = stmt.column_text(11);
    event.status = stmt.column_text(12) == "error" ? EventStatus::Error : EventStatus::Ok;
    event.error = stmt.column_optional_text(13);
    event.metadata = nlohmann::json::parse(stmt.column_text(14));
    return event;
}

std::optional<std::string> dedup_key_of(const TelemetryEvent& event) {
    const auto it = event.metadata.find(kDedupKey);
    if (it == event.metadata.end()) {
        return std::nullopt;
    }
    return it->get<std::string>();
}

}  // namespace

std::string_view to_string(EventStatus status) { return status == EventStatus::Error ? "error" : "ok"; }

void validate_event(const TelemetryEvent& event) {
    if (event.input_tokens < 0) {
        throw ValidationError("input_tokens", "input_tokens must be non-negative");
    }
    if (event.output_tokens < 0) {
        throw ValidationError("output_tokens", "output_tokens must be non-negative");
    }
    if (event.total_tokens != event.input_tokens + event.output_tokens) {
        throw ValidationError("total_tokens", "total_tokens mismatch: expected input_tokens + output_tokens");
    }
    if (event.cost < Micros{0}) {
        throw ValidationError("cost_usd", "cost_usd must be non-negative");
    }
    if (event.latency_ms && *event.latency_ms < 0) {
        throw ValidationError("latency_ms", "latency_ms must be non-negative");
    }
    if (event.status == EventStatus::Error && !event.error) {
        throw ValidationError("error", "error is required when status=error");
    }
    if (event.status == EventStatus::Ok && event.error) {
        throw ValidationError("error", "error must be absent when status=ok");
    }
    if (!event.metadata.is_object()) {
        throw ValidationError("metadata", "metadata must be a JSON object");
    }
    if (const auto it = event.metadata.find(kDedupKey); it != event.metadata.end()) {
        if (!it->is_string() || it->get_ref<const std::string&>().empty()) {
            throw ValidationError("metadata.dedup_key", "dedup_key must be a non-empty string");
        }
    }
}

TelemetryStore::TelemetryStore(Database& db, Clock clock) : db_(db), clock_(std::move(clock)) {}

RecordResult TelemetryStore::record_event(TelemetryEvent event) {
    validate_event(event);
    if (!event.timestamp) {
        event.timestamp = clock_();
    }
    if (event.id.empty()) {
        event.id = new_event_id();
    }
    const auto dedup_key = dedup_key_of(event);

    return db_.write([&](Connection& conn) {
        Statement insert(conn,
                         "INSERT INTO ai_telemetry (id, ts_ms, agent, operation, provider, model, input_tokens, "
                         "output_tokens, total_tokens, cost_micros, latency_ms, feature, status, error, metadata, "
                         "dedup_key) VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11, ?12, ?13, ?14, ?15, ?16) "
                         "ON CONFLICT (dedup_key) DO NOTHING");
        insert.bind(1, event.id)
            .bind(2, static_cast<std::int64_t>(event.timestamp->time_since_epoch().count()))
            .bind(3, event.agent)
            .bind(4, event.operation)
            .bind(5, event.provider)
            .bind(6, event.model)
            .bind(7, event.input_tokens)
            .bind(8, event.output_tokens)
            .bind(9, event.total_tokens)
            .bind(10, event.cost.count())
            .bind(11, event.latency_ms)
            .bind(12, event.feature)
            .bind(13, to_string(event.status))
            .bind(14, event.error)
            .bind(15, event.metadata.dump())
            .bind(16, dedup_key);
        insert.step();
        if (conn.changes() > 0) {
            return RecordResult{event.id, false};
        }
        Statement existing(conn, "SELECT id FROM ai_telemetry WHERE dedup_key = ?1");
        existing.bind(1, *dedup_key);
        if (!existing.step()) {
            throw StorageError("insert ignored but no row holds dedup_key " + *dedup_key, true);
        }
        return RecordResult{existing.column_text(0), true};
    });
}

std::vector<TelemetryEvent> TelemetryStore::query_events(const EventFilter& filter) const {
    const auto start = period_start(filter.period, clock_());
    std::string sql(kSelectColumns);
    sql += " WHERE (?1 IS NULL OR ts_ms >= ?1) AND (?2 IS NULL OR provider = ?2) AND (?3 IS NULL OR model = ?3)"
           " AND (?4 IS NULL OR feature = ?4) AND (?5 IS NULL OR agent = ?5) ORDER BY ts_ms, rowid";

    return db_.read([&](Connection& conn) {
        Statement stmt(conn, sql);
        std::optional<std::int64_t> start_ms;
        if (start) start_ms = start->time_since_epoch().count();
        stmt.bind(1, start_ms)
            .bind(2, filter.provider)
            .bind(3, filter.model)
            .bind(4, filter.feature)
            .bind(5, filter.agent);
        std::vector<TelemetryEvent> events;
        while (stmt.step()) {
            events.push_back(read_row(stmt));
        }
        return events;
    });
}

std::optional<TelemetryEvent> TelemetryStore::find_event(std::string_view id) const {
    return db_.read([&](Connection& conn) -> std::optional<TelemetryEvent> {
        Statement stmt(conn, std::string(kSelectColumns) + " WHERE id = ?1");
        stmt.bind(1, id);
        if (!stmt.step()) return std::nullopt;
        return read_row(stmt);
    });
}

bool TelemetryStore::has_dedup_key(std::string_view key) const {
    return db_.read([&](Connection& conn) {
        Statement stmt(conn, "SELECT 1 FROM ai_telemetry WHERE dedup_key = ?1");
        stmt.bind(1, key);
        return stmt.step();
    });
}

std::int64_t TelemetryStore::count_events() const {
    return db_.read([](Connection& conn) {
        Statement stmt(conn, "SELECT COUNT(*) FROM ai_telemetry");
        stmt.step();
        return stmt.column_int64(0);
    });
}

}  // namespace tokenledger::store
