#include "tokenledger/analytics/cost_analytics.hpp"

#include <algorithm>

#include "tokenledger/errors.hpp"

namespace tokenledger::analytics {

namespace {

using store::Connection;
using store::Statement;

constexpr std::string_view kWindow = " WHERE (?1 IS NULL OR ts_ms >= ?1) ";

std::string model_key_expr() {
    return "CASE WHEN model <> '' THEN model ELSE COALESCE(NULLIF(json_extract(metadata, '$.label'), ''), '" +
           std::string(kUnlabelledModelKey) + "') END";
}

std::vector<BreakdownRow> breakdown(Connection& conn, const std::string& key_expr,
                                    const std::optional<std::int64_t>& start_ms) {
    Statement stmt(conn, "SELECT " + key_expr +
                             " AS k, COUNT(*), SUM(input_tokens), SUM(output_tokens), SUM(cost_micros) "
                             "FROM ai_telemetry" +
                             std::string(kWindow) + "GROUP BY k");
    stmt.bind(1, start_ms);
    std::vector<BreakdownRow> rows;
    while (stmt.step()) {
        rows.push_back(BreakdownRow{stmt.column_text(0), stmt.column_int64(1), stmt.column_int64(2),
                                    stmt.column_int64(3), Micros{stmt.column_int64(4)}});
    }
    std::sort(rows.begin(), rows.end(), [](const BreakdownRow& a, const BreakdownRow& b) {
        if (a.cost != b.cost) return a.cost > b.cost;
        return a.key < b.key;
    });
    return rows;
}

}  // namespace

CostAnalytics::CostAnalytics(store::TelemetryStore& store) : store_(store) {}

CostSummary CostAnalytics::cost_summary(Period period) const {
    std::optional<std::int64_t> start_ms;
    if (const auto start = period_start(period, store_.now())) {
        start_ms = start->time_since_epoch().count();
    }

    return store_.database().read([&](Connection& conn) {
        CostSummary summary;
        summary.period = period;
        {
            // SUM over integers stays exact; SQLite raises on int64 overflow.
            Statement totals(conn,
                             "SELECT COUNT(*), COALESCE(SUM(input_tokens), 0), COALESCE(SUM(output_tokens), 0), "
                             "COALESCE(SUM(cost_micros), 0), AVG(latency_ms) FROM ai_telemetry" +
                                 std::string(kWindow));
            totals.bind(1, start_ms);
            totals.step();
            summary.total_events = totals.column_int64(0);
            summary.total_input_tokens = totals.column_int64(1);
            summary.total_output_tokens = totals.column_int64(2);
            summary.total_cost = Micros{totals.column_int64(3)};
            summary.average_latency_ms = totals.is_null(4) ? 0.0 : totals.column_double(4);
        }
        summary.by_model = breakdown(conn, model_key_expr(), start_ms);
        summary.by_feature = breakdown(conn, "feature", start_ms);
        summary.by_source = breakdown(conn, "agent", start_ms);

        Statement daily(conn,
                        "SELECT strftime('%Y-%m-%d', ts_ms / 1000, 'unixepoch') AS d, SUM(cost_micros), COUNT(*) "
                        "FROM ai_telemetry" +
                            std::string(kWindow) + "GROUP BY d ORDER BY d");
        daily.bind(1, start_ms);
        while (daily.step()) {
            const auto date = parse_date(daily.column_text(0));
            if (!date) {
                throw StorageError("unexpected daily bucket '" + daily.column_text(0) + "'", false);
            }
            summary.daily.push_back(DailyPoint{*date, Micros{daily.column_int64(1)}, daily.column_int64(2)});
        }
        return summary;
    });
}

std::vector<store::TelemetryEvent> CostAnalytics::top_events(Period period, std::size_t limit) const {
    auto events = store_.query_events(store::EventFilter{period, {}, {}, {}, {}});
    const auto middle = events.begin() + static_cast<std::ptrdiff_t>(std::min(limit, events.size()));
    std::partial_sort(events.begin(), middle, events.end(),
                      [](const store::TelemetryEvent& a, const store::TelemetryEvent& b) {
                          if (a.cost != b.cost) return a.cost > b.cost;
                          return a.timestamp < b.timestamp;
                      });
    events.erase(middle, events.end());
    return events;
}

std::string CostAnalytics::record_manual_cost(const ManualCostEntry& entry) {
    if (entry.label.empty()) {
        throw ValidationError("label", "label must be non-empty");
    }
    if (entry.cost <= Micros{0}) {
        throw ValidationError("cost_usd", "cost_usd must be greater than zero");
    }
    if (!entry.utc_date.ok()) {
        throw ValidationError("date", "date is not a valid calendar date");
    }

    store::TelemetryEvent event;
    event.timestamp = std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::sys_days{entry.utc_date});
    event.agent = "manual";
    event.operation = "manual_entry";
    event.provider = "manual";
    event.feature = "manual";
    event.cost = entry.cost;
    event.metadata = nlohmann::json{{"label", entry.label}, {"source", "manual"}};
    if (entry.note) {
        event.metadata["note"] = *entry.note;
    }
    return store_.record_event(std::move(event)).id;
}

}  // namespace tokenledger::analytics
