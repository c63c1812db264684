#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace tokenledger {

using TimePoint = std::chrono::sys_time<std::chrono::milliseconds>;

/// Source of "now". Production code uses system_clock(); tests pin it.
using Clock = std::function<TimePoint()>;

Clock system_clock();
Clock fixed_clock(TimePoint at);

/// "2025-01-02T03:04:05.000Z"
std::string format_iso8601(TimePoint tp);

/// Accepts "YYYY-MM-DDTHH:MM:SS[.fff...][Z|+HH:MM|-HH:MM]" and a bare
/// "YYYY-MM-DD" (midnight UTC). Fractional digits beyond milliseconds are
/// truncated.
std::optional<TimePoint> parse_iso8601(std::string_view text);

std::optional<std::chrono::year_month_day> parse_date(std::string_view text);
std::string format_date(std::chrono::year_month_day date);
std::chrono::year_month_day utc_date(TimePoint tp);

/// Trailing analytics window. Cutoffs are instant-based (now - N * 24h).
enum class Period { Days7, Days30, Days90, All };

std::optional<Period> parse_period(std::string_view text);
std::string_view to_string(Period period);

/// Inclusive lower bound for the window, or nullopt for Period::All.
std::optional<TimePoint> period_start(Period period, TimePoint now);

}  // namespace tokenledger
