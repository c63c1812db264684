#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "tokenledger/analytics/cost_analytics.hpp"
#include "tokenledger/intelligence/classifier.hpp"
#include "tokenledger/time.hpp"

namespace tokenledger::reports {

enum class ReportType { WeeklyDigest, CostReport, ReviewSummary };

std::string_view to_string(ReportType type);
/// Accepts "weekly_digest", "cost_report", "review_summary" and the short
/// CLI forms "weekly", "cost", "review".
std::optional<ReportType> parse_report_type(std::string_view text);

struct ReportRequest {
    ReportType type = ReportType::CostReport;
    Period period = Period::Days30;  // ignored for weekly_digest (always 7d) and review_summary
};

struct ReportDocument {
    ReportType type = ReportType::CostReport;
    TimePoint generated_at;
    std::string markdown;
    std::string html;
};

/// Thousands-separated integer, e.g. "1,234,567".
std::string format_count(std::int64_t value);

class ReportGenerator {
public:
    ReportGenerator(const analytics::CostAnalytics& analytics, const intelligence::ReviewCommentStore& comments,
                    const intelligence::RuleTable& rules, Clock clock);

    ReportDocument generate(const ReportRequest& request) const;

private:
    std::string weekly_digest(TimePoint now) const;
    std::string cost_report(Period period, TimePoint now) const;
    std::string review_summary(TimePoint now) const;

    const analytics::CostAnalytics& analytics_;
    const intelligence::ReviewCommentStore& comments_;
    const intelligence::RuleTable& rules_;
    Clock clock_;
};

}  // namespace tokenledger::reports
