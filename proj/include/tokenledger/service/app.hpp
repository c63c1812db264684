#pragma once

#include "tokenledger/analytics/cost_analytics.hpp"
#include "tokenledger/importer/claude_code_importer.hpp"
#include "tokenledger/intelligence/classifier.hpp"
#include "tokenledger/pricing/registry.hpp"
#include "tokenledger/reports/report_generator.hpp"
#include "tokenledger/service/config.hpp"
#include "tokenledger/store/telemetry_store.hpp"
#include "tokenledger/usage/gateway.hpp"

namespace tokenledger::service {

/// Every module wired over one database. Shared by the HTTP server and CLI.
class App {
public:
    App(const ServiceConfig& config, usage::Transport transport, Clock clock = system_clock());
    App(const App&) = delete;
    App& operator=(const App&) = delete;

    const ServiceConfig config;
    Clock clock;
    store::Database database;
    store::TelemetryStore telemetry;
    pricing::PricingRegistry registry;
    usage::Gateway gateway;
    importer::ClaudeCodeImporter importer;
    analytics::CostAnalytics analytics;
    intelligence::ReviewCommentStore comments;
    const intelligence::RuleTable rules;
    reports::ReportGenerator reports;
};

}  // namespace tokenledger::service
