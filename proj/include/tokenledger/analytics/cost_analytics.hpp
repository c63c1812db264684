#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tokenledger/money.hpp"
#include "tokenledger/store/telemetry_store.hpp"
#include "tokenledger/time.hpp"

namespace tokenledger::analytics {

/// Group key for events without a model and without a label.
inline constexpr std::string_view kUnlabelledModelKey = "(manual)";

struct BreakdownRow {
    std::string key;
    std::int64_t events = 0;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    Micros cost;

    friend bool operator==(const BreakdownRow&, const BreakdownRow&) = default;
};

struct DailyPoint {
    std::chrono::year_month_day utc_date;
    Micros cost;
    std::int64_t events = 0;

    friend bool operator==(const DailyPoint&, const DailyPoint&) = default;
};

struct CostSummary {
    Period period = Period::All;
    Micros total_cost;
    std::int64_t total_input_tokens = 0;
    std::int64_t total_output_tokens = 0;
    std::int64_t total_events = 0;
    double average_latency_ms = 0.0;  // over events that recorded latency; 0 when none
    std::vector<BreakdownRow> by_model;    // manual entries appear under their label
    std::vector<BreakdownRow> by_feature;
    std::vector<BreakdownRow> by_source;   // by agent
    std::vector<DailyPoint> daily;         // ascending UTC date
};

struct ManualCostEntry {
    std::string label;
    Micros cost;
    std::chrono::year_month_day utc_date;
    std::optional<std::string> note;
};

class CostAnalytics {
public:
    explicit CostAnalytics(store::TelemetryStore& store);

    /// Aggregates every event in the window from one read snapshot. Breakdown
    /// rows are ordered by cost descending, then key.
    CostSummary cost_summary(Period period) const;

    /// The `limit` most expensive events in the window.
    std::vector<store::TelemetryEvent> top_events(Period period, std::size_t limit) const;

    /// Stores a zero-token event dated at 00:00 UTC. Throws ValidationError on
    /// an empty label or non-positive cost.
    std::string record_manual_cost(const ManualCostEntry& entry);

private:
    store::TelemetryStore& store_;
};

}  // namespace tokenledger::analytics
