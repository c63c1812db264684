#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

#include "tokenledger/analytics/cost_analytics.hpp"
#include "tokenledger/importer/claude_code_importer.hpp"
#include "tokenledger/pricing/registry.hpp"
#include "tokenledger/reports/report_generator.hpp"
#include "tokenledger/store/telemetry_store.hpp"

// Wire format shared by the HTTP API and the CLI's JSON output. Money goes
// out twice: "<name>_usd" as a JSON number and "<name>_micros" as an exact
// integer.
namespace tokenledger::service {

nlohmann::json model_to_json(const pricing::ModelPricing& model);
nlohmann::json summary_to_json(const analytics::CostSummary& summary);
nlohmann::json event_to_json(const store::TelemetryEvent& event);
nlohmann::json import_result_to_json(const importer::ImportResult& result);

enum class ReportFormat { Markdown, Html, Both };
std::optional<ReportFormat> parse_report_format(std::string_view text);
nlohmann::json report_to_json(const reports::ReportDocument& doc, ReportFormat format);

/// Reads a USD amount given as a JSON number or decimal string. Throws
/// ValidationError naming `field` when missing or malformed.
Micros money_field(const nlohmann::json& body, const std::string& field);

/// Builds an override from a request body with model_id, provider,
/// display_name, input_cost_per_mtok and output_cost_per_mtok.
pricing::ModelPricing model_from_json(const nlohmann::json& body);

}  // namespace tokenledger::service
