#include "tokenledger/reports/report_generator.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "tokenledger/reports/markdown.hpp"

namespace tokenledger::reports {

namespace {

constexpr std::array<std::pair<ReportType, std::string_view>, 3> kTypes{{
    {ReportType::WeeklyDigest, "weekly_digest"},
    {ReportType::CostReport, "cost_report"},
    {ReportType::ReviewSummary, "review_summary"},
}};

constexpr std::string_view kOmittedSectionsNotice =
    "Pull request and issue-tracker sections are not included: this service does not collect that data.";

std::string period_label(Period period) {
    switch (period) {
        case Period::Days7: return "last 7 days";
        case Period::Days30: return "last 30 days";
        case Period::Days90: return "last 90 days";
        case Period::All: return "all time";
    }
    return "all time";
}

std::string cell(std::string_view text) {
    std::string out(text.empty() ? std::string_view("-") : text);
    for (auto& c : out) {
        if (c == '|' || c == '\n') c = ' ';
    }
    return out;
}

std::string percent(std::int64_t part, std::int64_t whole) {
    if (whole == 0) return "0.0%";
    const auto tenths = divide_half_even<std::int64_t>(part * 1000, whole);
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10) + "%";
}

void header(std::ostringstream& out, std::string_view title, TimePoint now) {
    out << "# " << title << "\n\n";
    out << "Generated " << format_iso8601(now) << "\n\n";
}

void totals_section(std::ostringstream& out, const analytics::CostSummary& summary) {
    out << "- **Total cost:** " << summary.total_cost.to_dollars() << "\n";
    out << "- **Events:** " << format_count(summary.total_events) << "\n";
    out << "- **Input tokens:** " << format_count(summary.total_input_tokens) << "\n";
    out << "- **Output tokens:** " << format_count(summary.total_output_tokens) << "\n\n";
}

void breakdown_table(std::ostringstream& out, std::string_view key_header,
                     const std::vector<analytics::BreakdownRow>& rows) {
    out << "| " << key_header << " | Events | Input tokens | Output tokens | Cost |\n";
    out << "|---|---:|---:|---:|---:|\n";
    for (const auto& row : rows) {
        out << "| " << cell(row.key) << " | " << format_count(row.events) << " | " << format_count(row.input_tokens)
            << " | " << format_count(row.output_tokens) << " | " << row.cost.to_dollars() << " |\n";
    }
    out << "\n";
}

}  // namespace

std::string_view to_string(ReportType type) {
    for (const auto& [t, name] : kTypes) {
        if (t == type) return name;
    }
    return "cost_report";
}

std::optional<ReportType> parse_report_type(std::string_view text) {
    if (text == "weekly") return ReportType::WeeklyDigest;
    if (text == "cost") return ReportType::CostReport;
    if (text == "review") return ReportType::ReviewSummary;
    for (const auto& [t, name] : kTypes) {
        if (name == text) return t;
    }
    return std::nullopt;
}

std::string format_count(std::int64_t value) {
    const bool negative = value < 0;
    std::string digits = std::to_string(value);
    if (negative) digits.erase(0, 1);
    std::string out;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
        out += digits[i];
    }
    return negative ? "-" + out : out;
}

ReportGenerator::ReportGenerator(const analytics::CostAnalytics& analytics,
                                 const intelligence::ReviewCommentStore& comments,
                                 const intelligence::RuleTable& rules, Clock clock)
    : analytics_(analytics), comments_(comments), rules_(rules), clock_(std::move(clock)) {}

ReportDocument ReportGenerator::generate(const ReportRequest& request) const {
    ReportDocument doc;
    doc.type = request.type;
    doc.generated_at = clock_();
    switch (request.type) {
        case ReportType::WeeklyDigest: doc.markdown = weekly_digest(doc.generated_at); break;
        case ReportType::CostReport: doc.markdown = cost_report(request.period, doc.generated_at); break;
        case ReportType::ReviewSummary: doc.markdown = review_summary(doc.generated_at); break;
    }
    doc.html = markdown_to_html(doc.markdown);
    return doc;
}

std::string ReportGenerator::weekly_digest(TimePoint now) const {
    const auto summary = analytics_.cost_summary(Period::Days7);
    std::ostringstream out;
    header(out, "Weekly Digest", now);
    out << kOmittedSectionsNotice << "\n\n";
    out << "## AI spend, last 7 days\n\n";
    if (summary.total_events == 0) {
        out << "No AI activity was recorded in the last 7 days.\n\n";
        totals_section(out, summary);
        return out.str();
    }
    totals_section(out, summary);
    out << "## Cost by model\n\n";
    breakdown_table(out, "Model", summary.by_model);

    out << "## Notable events\n\n";
    out << "| When (UTC) | Source | Model | Feature | Tokens | Cost |\n";
    out << "|---|---|---|---|---:|---:|\n";
    for (const auto& event : analytics_.top_events(Period::Days7, 5)) {
        out << "| " << (event.timestamp ? format_iso8601(*event.timestamp) : std::string("-")) << " | "
            << cell(event.agent) << " | " << cell(event.model) << " | " << cell(event.feature) << " | "
            << format_count(event.total_tokens) << " | " << event.cost.to_dollars() << " |\n";
    }
    out << "\n";
    return out.str();
}

std::string ReportGenerator::cost_report(Period period, TimePoint now) const {
    const auto summary = analytics_.cost_summary(period);
    std::ostringstream out;
    header(out, "Cost Report", now);
    out << "Period: " << period_label(period) << "\n\n";
    out << "## Totals\n\n";
    totals_section(out, summary);
    if (summary.average_latency_ms > 0) {
        out << "Average latency over events that recorded one: "
            << format_count(static_cast<std::int64_t>(summary.average_latency_ms + 0.5)) << " ms\n\n";
    }
    out << "## By model\n\n";
    breakdown_table(out, "Model", summary.by_model);
    out << "## By feature\n\n";
    breakdown_table(out, "Feature", summary.by_feature);
    out << "## By source\n\n";
    breakdown_table(out, "Source", summary.by_source);
    out << "## Daily trend\n\n";
    out << "| Date (UTC) | Events | Cost |\n";
    out << "|---|---:|---:|\n";
    for (const auto& point : summary.daily) {
        out << "| " << format_date(point.utc_date) << " | " << format_count(point.events) << " | "
            << point.cost.to_dollars() << " |\n";
    }
    out << "\n";
    return out.str();
}

std::string ReportGenerator::review_summary(TimePoint now) const {
    std::vector<intelligence::CommentClassification> classified;
    for (const auto& body : comments_.comments()) {
        classified.push_back(rules_.classify(body));
    }
    const auto digest = intelligence::build_digest(classified);
    const auto total = static_cast<std::int64_t>(classified.size());

    std::ostringstream out;
    header(out, "Review Summary", now);
    out << "Classified " << format_count(total) << " review comments.\n\n";
    out << "## Category distribution\n\n";
    out << "| Category | Comments | Share |\n";
    out << "|---|---:|---:|\n";
    std::vector<std::pair<std::string, std::int64_t>> rows(digest.distribution.begin(), digest.distribution.end());
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [name, count] : rows) {
        out << "| " << name << " | " << format_count(count) << " | " << percent(count, total) << " |\n";
    }
    out << "\n## Top patterns\n\n";
    if (digest.top_patterns.empty()) {
        out << "No pattern matched any comment.\n\n";
    } else {
        for (const auto& [pattern, count] : digest.top_patterns) {
            out << "- `" << pattern << "`: " << format_count(count) << "\n";
        }
        out << "\n";
    }
    if (const auto narrative = comments_.latest_narrative()) {
        out << "## Narrative\n\n" << *narrative << "\n";
    }
    return out.str();
}

}  // namespace tokenledger::reports
