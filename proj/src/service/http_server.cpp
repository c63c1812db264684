#include "tokenledger/service/http_server.hpp"

#include <httplib.h>

#include <chrono>
#include <regex>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "tokenledger/errors.hpp"
#include "tokenledger/service/json_api.hpp"

namespace tokenledger::service {

using nlohmann::json;

namespace {

constexpr std::string_view kPlaceholderPage =
    "<!DOCTYPE html>\n<html lang=\"en\"><head><meta charset=\"utf-8\"><title>tokenledger</title></head>"
    "<body><h1>tokenledger</h1><p>The API is running. No UI bundle is configured; set "
    "TOKENLEDGER_STATIC_DIR to serve one.</p></body></html>\n";

const std::regex kLocalOrigin(R"(^https?://(localhost|127\.0\.0\.1|\[::1\])(:\d+)?$)");

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& error,
                const std::optional<std::string>& detail = std::nullopt) {
    json body{{"error", error}};
    if (detail) body["detail"] = *detail;
    send_json(res, status, body);
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
        throw ValidationError("body", "request body must be a JSON object");
    }
    return body;
}

std::string string_field(const json& body, const char* field, std::string fallback = {}) {
    const auto it = body.find(field);
    if (it == body.end() || it->is_null()) return fallback;
    if (!it->is_string()) throw ValidationError(field, std::string(field) + " must be a string");
    return it->get<std::string>();
}

Period period_param(std::string_view text) {
    const auto period = parse_period(text);
    if (!period) throw ValidationError("period", "period must be one of 7d, 30d, 90d, all");
    return *period;
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

/// Maps domain exceptions onto the error envelope.
Handler guarded(Handler inner) {
    return [inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
        try {
            inner(req, res);
        } catch (const ValidationError& e) {
            send_error(res, 400, e.what(), e.field());
        } catch (const NotFoundError& e) {
            send_error(res, 404, e.what());
        } catch (const ConflictError& e) {
            send_error(res, 409, e.what());
        } catch (const UpstreamError& e) {
            send_error(res, 502, e.what(), e.event_id());
        } catch (const std::exception& e) {
            spdlog::error("{} {} failed: {}", req.method, req.path, e.what());
            send_error(res, 500, "internal error", e.what());
        }
    };
}

}  // namespace

struct ApiServer::Impl {
    explicit Impl(App& a) : app(a) {}

    void routes();

    App& app;
    httplib::Server server;
    bool bound = false;
};

void ApiServer::Impl::routes() {
    server.Get("/health", guarded([](const httplib::Request&, httplib::Response& res) {
                   send_json(res, 200, json{{"status", "ok"}});
               }));

    server.Get("/api/ai/models", guarded([this](const httplib::Request&, httplib::Response& res) {
                   json models = json::array();
                   for (const auto& model : app.registry.list_models()) models.push_back(model_to_json(model));
                   send_json(res, 200, json{{"count", models.size()}, {"models", std::move(models)}});
               }));

    server.Post("/api/ai/models", guarded([this](const httplib::Request& req, httplib::Response& res) {
                    const auto stored = app.registry.upsert_override(model_from_json(parse_body(req)));
                    send_json(res, 201, model_to_json(stored));
                }));

    server.Delete(R"(/api/ai/models/(.+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                      const std::string id = req.matches[1];
                      if (!app.registry.delete_override(id)) {
                          throw NotFoundError("no override for model '" + id + "'");
                      }
                      send_json(res, 200, json{{"deleted", id}});
                  }));

    server.Get("/api/ai/costs", guarded([this](const httplib::Request& req, httplib::Response& res) {
                   const auto period = period_param(req.has_param("period") ? req.get_param_value("period") : "30d");
                   send_json(res, 200, summary_to_json(app.analytics.cost_summary(period)));
               }));

    server.Post("/api/ai/costs/manual", guarded([this](const httplib::Request& req, httplib::Response& res) {
                    const auto body = parse_body(req);
                    analytics::ManualCostEntry entry;
                    entry.label = string_field(body, "label");
                    entry.cost = money_field(body, body.contains("cost_usd") ? "cost_usd" : "amount");
                    const auto date_text = string_field(body, "date");
                    if (date_text.empty()) {
                        entry.utc_date = utc_date(app.clock());
                    } else {
                        const auto date = parse_date(date_text);
                        if (!date) throw ValidationError("date", "date must be YYYY-MM-DD");
                        entry.utc_date = *date;
                    }
                    if (auto note = string_field(body, "note"); !note.empty()) entry.note = std::move(note);
                    const auto id = app.analytics.record_manual_cost(entry);
                    send_json(res, 201, json{{"id", id}});
                }));

    server.Post("/api/ai/import/claude-code", guarded([this](const httplib::Request& req, httplib::Response& res) {
                    const auto body = parse_body(req);
                    const auto root_text = string_field(body, "root");
                    const std::filesystem::path root =
                        root_text.empty() ? importer::default_claude_projects_root() : std::filesystem::path(root_text);
                    if (!root_text.empty() && !std::filesystem::is_directory(root)) {
                        throw ValidationError("root", "root is not a directory: " + root_text);
                    }
                    bool dry_run = false;
                    if (const auto it = body.find("dry_run"); it != body.end() && !it->is_null()) {
                        if (!it->is_boolean()) throw ValidationError("dry_run", "dry_run must be a boolean");
                        dry_run = it->get<bool>();
                    }
                    auto result = import_result_to_json(app.importer.run(root, dry_run));
                    result["dry_run"] = dry_run;
                    send_json(res, 200, result);
                }));

    server.Post("/api/reports/generate", guarded([this](const httplib::Request& req, httplib::Response& res) {
                    const auto body = parse_body(req);
                    const auto type = reports::parse_report_type(string_field(body, "report_type"));
                    if (!type) {
                        throw ValidationError("report_type",
                                              "report_type must be weekly_digest, cost_report or review_summary");
                    }
                    const auto format = parse_report_format(string_field(body, "format", "both"));
                    if (!format) throw ValidationError("format", "format must be md, html or both");
                    reports::ReportRequest request{*type, period_param(string_field(body, "period", "30d"))};
                    send_json(res, 200, report_to_json(app.reports.generate(request), *format));
                }));

    server.Post("/api/intelligence/summary", guarded([this](const httplib::Request& req, httplib::Response& res) {
                    const auto body = parse_body(req);
                    const auto provider = usage::parse_provider(string_field(body, "provider"));
                    if (!provider) throw ValidationError("provider", "provider must be anthropic, gemini or ollama");
                    const auto model = string_field(body, "model");
                    if (model.empty()) throw ValidationError("model", "model must be a non-empty string");

                    if (const auto it = body.find("comments"); it != body.end() && !it->is_null()) {
                        if (!it->is_array()) throw ValidationError("comments", "comments must be an array of strings");
                        std::vector<std::string> bodies;
                        for (const auto& c : *it) {
                            if (!c.is_string()) throw ValidationError("comments", "comments must be strings");
                            bodies.push_back(c.get<std::string>());
                        }
                        app.comments.add_comments(bodies);
                    }

                    std::vector<intelligence::CommentClassification> classified;
                    for (const auto& text : app.comments.comments()) classified.push_back(app.rules.classify(text));
                    const auto digest = intelligence::build_digest(classified);
                    const auto result = intelligence::generate_ai_summary(digest, app.gateway, *provider, model);
                    app.comments.save_narrative(result.text, result.provider, result.model, result.event_id);

                    json out{{"narrative", result.text},
                             {"event_id", result.event_id},
                             {"provider", result.provider},
                             {"model", result.model},
                             {"input_tokens", result.usage.input_tokens},
                             {"output_tokens", result.usage.output_tokens}};
                    if (const auto event = app.telemetry.find_event(result.event_id)) {
                        out["cost_usd"] = event->cost.to_usd();
                        out["cost_micros"] = event->cost.count();
                    }
                    send_json(res, 200, out);
                }));

    if (app.config.static_dir) {
        if (!server.set_mount_point("/", app.config.static_dir->string())) {
            spdlog::warn("static directory {} not found; serving placeholder", app.config.static_dir->string());
        }
    }
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(std::string(kPlaceholderPage), "text/html; charset=utf-8");
    });

    server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.set_post_routing_handler([](const httplib::Request& req, httplib::Response& res) {
        const auto origin = req.get_header_value("Origin");
        if (!origin.empty() && std::regex_match(origin, kLocalOrigin)) {
            res.set_header("Access-Control-Allow-Origin", origin);
            res.set_header("Vary", "Origin");
            res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
        }
    });

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.status == 404 && res.body.empty()) send_error(res, 404, "not found");
    });

    server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
        spdlog::info("{} {} -> {}", req.method, req.path, res.status);
    });
}

ApiServer::ApiServer(App& app) : impl_(std::make_unique<Impl>(app)) { impl_->routes(); }

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = impl_->server.bind_to_any_port(host);
        if (bound <= 0) throw Error("cannot bind " + host + " to a free port");
        impl_->bound = true;
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port)) {
        throw Error("cannot bind " + host + ":" + std::to_string(port));
    }
    impl_->bound = true;
    return port;
}

void ApiServer::serve() {
    if (!impl_->bound) throw Error("serve() called before bind()");
    impl_->server.listen_after_bind();
}

void ApiServer::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

void ApiServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace tokenledger::service
