#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tokenledger/service/config.hpp"
#include "tokenledger/time.hpp"
#include "tokenledger/usage/gateway.hpp"

namespace tokenledger::service {

/// Seams for tests. Empty members fall back to the real environment.
struct CliHooks {
    usage::Transport transport;
    Clock clock;
    ServiceConfig::EnvLookup env;
};

/// Runs one command. `args` excludes the program name. Returns 0 on success,
/// 1 on a runtime failure and 2 on a usage error (unknown subcommand, bad
/// option).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const CliHooks& hooks = {});

int run_cli(int argc, char** argv);

}  // namespace tokenledger::service
