#include "tokenledger/service/app.hpp"

namespace tokenledger::service {

namespace {

intelligence::RuleTable load_rules(const ServiceConfig& config) {
    return config.rules_path ? intelligence::RuleTable::load(*config.rules_path) : intelligence::RuleTable::builtin();
}

}  // namespace

App::App(const ServiceConfig& cfg, usage::Transport transport, Clock clk)
    : config(cfg),
      clock(std::move(clk)),
      database(config.db_path),
      telemetry(database, clock),
      registry(config.registry_path, database, clock, config.cache_ttl),
      gateway(telemetry, registry, std::move(transport), config.credentials, config.multipliers),
      importer(telemetry, registry, config.multipliers),
      analytics(telemetry),
      comments(database, clock),
      rules(load_rules(config)),
      reports(analytics, comments, rules, clock) {
    config.validate();
}

}  // namespace tokenledger::service
