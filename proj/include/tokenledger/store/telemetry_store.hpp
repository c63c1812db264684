#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tokenledger/money.hpp"
#include "tokenledger/store/database.hpp"
#include "tokenledger/time.hpp"

namespace tokenledger::store {

enum class EventStatus { Ok, Error };

std::string_view to_string(EventStatus status);

/// Metadata key under which imported events carry their identity.
inline constexpr std::string_view kDedupKey = "dedup_key";

/// One AI interaction in the unified telemetry table.
struct TelemetryEvent {
    std::string id;                      // assigned by record_event
    std::optional<TimePoint> timestamp;  // "now" when absent on insert
    std::string agent;
    std::string operation;
    std::string provider;
    std::string model;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::int64_t total_tokens = 0;
    Micros cost;
    std::optional<std::int64_t> latency_ms;
    std::string feature;
    EventStatus status = EventStatus::Ok;
    std::optional<std::string> error;
    nlohmann::json metadata = nlohmann::json::object();

    /// Sets input/output and the derived total together.
    void set_tokens(std::int64_t input, std::int64_t output) {
        input_tokens = input;
        output_tokens = output;
        total_tokens = input + output;
    }

    friend bool operator==(const TelemetryEvent&, const TelemetryEvent&) = default;
};

/// Throws ValidationError naming the first violated invariant.
void validate_event(const TelemetryEvent& event);

struct RecordResult {
    std::string id;
    bool duplicate = false;
};

struct EventFilter {
    Period period = Period::All;
    std::optional<std::string> provider;
    std::optional<std::string> model;
    std::optional<std::string> feature;
    std::optional<std::string> agent;
};

class TelemetryStore {
public:
    TelemetryStore(Database& db, Clock clock);

    /// Persists the event. An event whose metadata dedup_key already exists
    /// is not written again; the original id comes back with duplicate=true.
    RecordResult record_event(TelemetryEvent event);

    /// Events in the window matching every supplied filter, oldest first.
    std::vector<TelemetryEvent> query_events(const EventFilter& filter) const;

    std::optional<TelemetryEvent> find_event(std::string_view id) const;
    bool has_dedup_key(std::string_view key) const;
    std::int64_t count_events() const;

    Database& database() const { return db_; }
    TimePoint now() const { return clock_(); }

private:
    Database& db_;
    Clock clock_;
};

}  // namespace tokenledger::store
