#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "tokenledger/service/app.hpp"

namespace tokenledger::service {

/// HTTP binding of the App. Routes:
///   GET  /health
///   GET  /api/ai/models            POST /api/ai/models
///   DELETE /api/ai/models/{id}
///   GET  /api/ai/costs?period=7d|30d|90d|all
///   POST /api/ai/costs/manual
///   POST /api/ai/import/claude-code
///   POST /api/reports/generate
///   POST /api/intelligence/summary
/// Errors use {"error": ..., "detail"?: ...} with 400/404/409/500/502.
class ApiServer {
public:
    explicit ApiServer(App& app);
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds without serving. Port 0 picks a free port. Returns the bound
    /// port; throws Error when binding fails.
    int bind(const std::string& host, int port);
    /// Serves until stop(). Requires a successful bind().
    void serve();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace tokenledger::service
