#include "tokenledger/service/json_api.hpp"

#include "tokenledger/errors.hpp"

namespace tokenledger::service {

using nlohmann::json;

namespace {

void put_money(json& out, const std::string& name, Micros amount) {
    out[name + "_usd"] = amount.to_usd();
    out[name + "_micros"] = amount.count();
}

json rows_to_json(const std::vector<analytics::BreakdownRow>& rows) {
    json out = json::array();
    for (const auto& row : rows) {
        json item{{"key", row.key},
                  {"events", row.events},
                  {"input_tokens", row.input_tokens},
                  {"output_tokens", row.output_tokens}};
        put_money(item, "cost", row.cost);
        out.push_back(std::move(item));
    }
    return out;
}

std::string required_string(const json& body, const char* field) {
    const auto it = body.find(field);
    if (it == body.end() || !it->is_string() || it->get_ref<const std::string&>().empty()) {
        throw ValidationError(field, std::string(field) + " must be a non-empty string");
    }
    return it->get<std::string>();
}

std::string optional_string(const json& body, const char* field) {
    const auto it = body.find(field);
    if (it == body.end() || it->is_null()) return {};
    if (!it->is_string()) throw ValidationError(field, std::string(field) + " must be a string");
    return it->get<std::string>();
}

}  // namespace

json model_to_json(const pricing::ModelPricing& model) {
    json out{{"model_id", model.model_id},
             {"provider", model.provider},
             {"display_name", model.display_name},
             {"source", std::string(pricing::to_string(model.source))}};
    put_money(out, "input_cost_per_mtok", model.input_cost_per_mtok);
    put_money(out, "output_cost_per_mtok", model.output_cost_per_mtok);
    return out;
}

json summary_to_json(const analytics::CostSummary& summary) {
    json out{{"period", std::string(to_string(summary.period))},
             {"total_events", summary.total_events},
             {"total_input_tokens", summary.total_input_tokens},
             {"total_output_tokens", summary.total_output_tokens},
             {"average_latency_ms", summary.average_latency_ms},
             {"by_model", rows_to_json(summary.by_model)},
             {"by_feature", rows_to_json(summary.by_feature)},
             {"by_source", rows_to_json(summary.by_source)}};
    put_money(out, "total_cost", summary.total_cost);
    json daily = json::array();
    for (const auto& point : summary.daily) {
        json item{{"date", format_date(point.utc_date)}, {"events", point.events}};
        put_money(item, "cost", point.cost);
        daily.push_back(std::move(item));
    }
    out["daily"] = std::move(daily);
    return out;
}

json event_to_json(const store::TelemetryEvent& event) {
    json out{{"id", event.id},
             {"timestamp", event.timestamp ? json(format_iso8601(*event.timestamp)) : json(nullptr)},
             {"agent", event.agent},
             {"operation", event.operation},
             {"provider", event.provider},
             {"model", event.model},
             {"input_tokens", event.input_tokens},
             {"output_tokens", event.output_tokens},
             {"total_tokens", event.total_tokens},
             {"latency_ms", event.latency_ms ? json(*event.latency_ms) : json(nullptr)},
             {"feature", event.feature},
             {"status", std::string(to_string(event.status))},
             {"error", event.error ? json(*event.error) : json(nullptr)},
             {"metadata", event.metadata}};
    put_money(out, "cost", event.cost);
    return out;
}

json import_result_to_json(const importer::ImportResult& result) {
    return json{{"files_scanned", result.files_scanned},
                {"lines_read", result.lines_read},
                {"events_imported", result.events_imported},
                {"duplicates_skipped", result.duplicates_skipped},
                {"lines_skipped_malformed", result.lines_skipped_malformed}};
}

std::optional<ReportFormat> parse_report_format(std::string_view text) {
    if (text == "md" || text == "markdown") return ReportFormat::Markdown;
    if (text == "html") return ReportFormat::Html;
    if (text == "both") return ReportFormat::Both;
    return std::nullopt;
}

json report_to_json(const reports::ReportDocument& doc, ReportFormat format) {
    json out{{"report_type", std::string(reports::to_string(doc.type))},
             {"generated_at", format_iso8601(doc.generated_at)}};
    if (format != ReportFormat::Html) out["markdown"] = doc.markdown;
    if (format != ReportFormat::Markdown) out["html"] = doc.html;
    return out;
}

Micros money_field(const json& body, const std::string& field) {
    const auto it = body.find(field);
    if (it == body.end() || it->is_null()) {
        throw ValidationError(field, field + " is required");
    }
    std::optional<Micros> parsed;
    if (it->is_string()) {
        parsed = Micros::parse(it->get_ref<const std::string&>());
    } else if (it->is_number_integer()) {
        parsed = Micros::parse(it->dump());
    } else if (it->is_number_float()) {
        // Shortest round-trip text keeps 0.15 as "0.15"; exponent forms fall back to rounding.
        parsed = Micros::parse(it->dump());
        if (!parsed) parsed = Micros::from_usd(it->get<double>());
    }
    if (!parsed) {
        throw ValidationError(field, field + " must be a decimal USD amount with at most 6 fractional digits");
    }
    return *parsed;
}

pricing::ModelPricing model_from_json(const json& body) {
    if (!body.is_object()) throw ValidationError("body", "expected a JSON object");
    pricing::ModelPricing model;
    model.model_id = required_string(body, "model_id");
    model.provider = optional_string(body, "provider");
    model.display_name = optional_string(body, "display_name");
    model.input_cost_per_mtok = money_field(body, "input_cost_per_mtok");
    model.output_cost_per_mtok = money_field(body, "output_cost_per_mtok");
    model.source = pricing::PricingSource::Override;
    return model;
}

}  // namespace tokenledger::service
