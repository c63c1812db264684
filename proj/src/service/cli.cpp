#include "tokenledger/service/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "tokenledger/errors.hpp"
#include "tokenledger/service/app.hpp"
#include "tokenledger/service/http_server.hpp"
#include "tokenledger/service/json_api.hpp"

namespace tokenledger::service {

namespace {

std::atomic<ApiServer*> g_running_server{nullptr};

extern "C" void handle_stop_signal(int) {
    if (auto* server = g_running_server.load()) server->stop();
}

Micros parse_amount(const std::string& text, const std::string& option) {
    const auto amount = Micros::parse(text);
    if (!amount) throw ValidationError(option, option + ": expected a decimal USD amount, got '" + text + "'");
    return *amount;
}

struct Options {
    std::string db;
    std::string registry;
    std::string rules;

    // serve
    std::string host;
    int port = 0;
    std::string static_dir;

    // import-claude-code
    std::string import_root;
    bool dry_run = false;

    // report
    std::string report_type = "cost";
    std::string report_format = "md";
    std::string report_period = "30d";
    std::string report_out;

    // add-cost
    std::string label;
    std::string amount;
    std::string date;
    std::string note;

    // models
    std::string model_id;
    std::string model_provider;
    std::string model_name;
    std::string model_input;
    std::string model_output;

    // classify
    std::string classify_file;
    bool classify_store = false;
};

int cmd_serve(App& app, std::ostream& out) {
    ApiServer server(app);
    const int port = server.bind(app.config.host, app.config.port);
    out << "listening on http://" << app.config.host << ":" << port << std::endl;
    g_running_server.store(&server);
    std::signal(SIGINT, handle_stop_signal);
    std::signal(SIGTERM, handle_stop_signal);
    server.serve();
    g_running_server.store(nullptr);
    return 0;
}

int cmd_import(App& app, const Options& opts, std::ostream& out) {
    const std::filesystem::path root =
        opts.import_root.empty() ? importer::default_claude_projects_root() : std::filesystem::path(opts.import_root);
    auto result = import_result_to_json(app.importer.run(root, opts.dry_run));
    result["dry_run"] = opts.dry_run;
    out << result.dump(2) << "\n";
    return 0;
}

int cmd_report(App& app, const Options& opts, std::ostream& out, std::ostream& err) {
    const auto type = reports::parse_report_type(opts.report_type);
    const auto period = parse_period(opts.report_period);
    if (!type || !period) {
        err << "error: invalid --type or --period\n";
        return 2;
    }
    const auto doc = app.reports.generate(reports::ReportRequest{*type, *period});
    const auto& text = opts.report_format == "html" ? doc.html : doc.markdown;
    if (opts.report_out.empty()) {
        out << text;
        return 0;
    }
    std::ofstream file(opts.report_out, std::ios::binary);
    file << text;
    if (!file) {
        err << "error: cannot write " << opts.report_out << "\n";
        return 1;
    }
    out << "wrote " << opts.report_out << "\n";
    return 0;
}

int cmd_add_cost(App& app, const Options& opts, std::ostream& out) {
    analytics::ManualCostEntry entry;
    entry.label = opts.label;
    entry.cost = parse_amount(opts.amount, "--amount");
    if (opts.date.empty()) {
        entry.utc_date = utc_date(app.clock());
    } else {
        const auto date = parse_date(opts.date);
        if (!date) throw ValidationError("--date", "--date must be YYYY-MM-DD");
        entry.utc_date = *date;
    }
    if (!opts.note.empty()) entry.note = opts.note;
    out << app.analytics.record_manual_cost(entry) << "\n";
    return 0;
}

int cmd_models_list(App& app, std::ostream& out) {
    out << std::left << std::setw(28) << "MODEL" << std::setw(12) << "PROVIDER" << std::setw(14) << "INPUT/MTOK"
        << std::setw(14) << "OUTPUT/MTOK" << "SOURCE\n";
    for (const auto& m : app.registry.list_models()) {
        out << std::left << std::setw(28) << m.model_id << std::setw(12) << m.provider << std::setw(14)
            << m.input_cost_per_mtok.to_decimal() << std::setw(14) << m.output_cost_per_mtok.to_decimal()
            << pricing::to_string(m.source) << "\n";
    }
    return 0;
}

int cmd_models_add(App& app, const Options& opts, std::ostream& out) {
    pricing::ModelPricing model;
    model.model_id = opts.model_id;
    model.provider = opts.model_provider;
    model.display_name = opts.model_name;
    model.input_cost_per_mtok = parse_amount(opts.model_input, "--input");
    model.output_cost_per_mtok = parse_amount(opts.model_output, "--output");
    model.source = pricing::PricingSource::Override;
    const auto stored = app.registry.upsert_override(model);
    out << model_to_json(stored).dump(2) << "\n";
    return 0;
}

int cmd_models_rm(App& app, const Options& opts, std::ostream& out, std::ostream& err) {
    if (!app.registry.delete_override(opts.model_id)) {
        err << "error: model override '" << opts.model_id << "' not found\n";
        return 1;
    }
    out << "removed " << opts.model_id << "\n";
    return 0;
}

int cmd_classify(App& app, const Options& opts, std::ostream& out, std::ostream& err) {
    std::ifstream in(opts.classify_file);
    if (!in) {
        err << "error: cannot read " << opts.classify_file << "\n";
        return 1;
    }
    std::vector<std::string> bodies;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos) bodies.push_back(line);
    }
    std::vector<intelligence::CommentClassification> classified;
    for (const auto& body : bodies) {
        classified.push_back(app.rules.classify(body));
        out << classified.back().label() << "\t" << body << "\n";
    }
    const auto digest = intelligence::build_digest(classified);
    out << "\n";
    for (const auto& [category, count] : digest.distribution) {
        out << category << ": " << count << "\n";
    }
    if (opts.classify_store) app.comments.add_comments(bodies);
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const CliHooks& hooks) {
    CLI::App cli{"Token usage and AI cost tracking service", "tokenledger"};
    cli.require_subcommand(1);
    Options opts;
    cli.add_option("--db", opts.db, "SQLite database path (env TOKENLEDGER_DB)");
    cli.add_option("--registry", opts.registry, "Builtin pricing registry JSON (env TOKENLEDGER_REGISTRY)");
    cli.add_option("--rules", opts.rules, "Review category rule table JSON (env TOKENLEDGER_RULES)");

    auto* serve = cli.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--host", opts.host, "Listen address");
    serve->add_option("--port", opts.port, "Listen port")->check(CLI::Range(1, 65535));
    serve->add_option("--static-dir", opts.static_dir, "Directory served at /");

    auto* import = cli.add_subcommand("import-claude-code", "Import usage from Claude Code session transcripts");
    import->add_option("--root", opts.import_root, "Transcript root (default ~/.claude/projects)");
    import->add_flag("--dry-run", opts.dry_run, "Count without writing");

    auto* report = cli.add_subcommand("report", "Generate a report");
    report->add_option("--type", opts.report_type, "weekly | cost | review")
        ->check(CLI::IsMember({"weekly", "cost", "review", "weekly_digest", "cost_report", "review_summary"}));
    report->add_option("--format", opts.report_format, "md | html")->check(CLI::IsMember({"md", "html"}));
    report->add_option("--period", opts.report_period, "7d | 30d | 90d | all (cost report)")
        ->check(CLI::IsMember({"7d", "30d", "90d", "all"}));
    report->add_option("--out", opts.report_out, "Output file (default stdout)");

    auto* add_cost = cli.add_subcommand("add-cost", "Record a manual cost entry");
    add_cost->add_option("--label", opts.label, "What the spend was for")->required();
    add_cost->add_option("--amount", opts.amount, "USD amount")->required();
    add_cost->add_option("--date", opts.date, "UTC date YYYY-MM-DD (default today)");
    add_cost->add_option("--note", opts.note, "Free-form note");

    auto* models = cli.add_subcommand("models", "Inspect or edit model pricing");
    models->require_subcommand(1);
    auto* models_list = models->add_subcommand("list", "List resolved pricing");
    auto* models_add = models->add_subcommand("add", "Add or replace a pricing override");
    models_add->add_option("--id", opts.model_id, "Model id")->required();
    models_add->add_option("--provider", opts.model_provider, "Provider name");
    models_add->add_option("--name", opts.model_name, "Display name");
    models_add->add_option("--input", opts.model_input, "USD per million input tokens")->required();
    models_add->add_option("--output", opts.model_output, "USD per million output tokens")->required();
    auto* models_rm = models->add_subcommand("rm", "Remove a pricing override");
    models_rm->add_option("id", opts.model_id, "Model id")->required();

    auto* classify = cli.add_subcommand("classify", "Classify review comments, one per line");
    classify->add_option("--file", opts.classify_file, "Comments file")->required();
    classify->add_flag("--store", opts.classify_store, "Also store the comments for review summaries");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        cli.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << cli.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << cli.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << cli.help();
        return 2;
    }

    try {
        auto config = hooks.env ? ServiceConfig::from_env(hooks.env) : ServiceConfig::from_env();
        if (!opts.db.empty()) config.db_path = opts.db;
        if (!opts.registry.empty()) config.registry_path = opts.registry;
        if (!opts.rules.empty()) config.rules_path = opts.rules;
        if (!opts.host.empty()) config.host = opts.host;
        if (opts.port != 0) config.port = opts.port;
        if (!opts.static_dir.empty()) config.static_dir = opts.static_dir;

        App app(config, hooks.transport ? hooks.transport : usage::make_http_transport(),
                hooks.clock ? hooks.clock : system_clock());

        if (serve->parsed()) return cmd_serve(app, out);
        if (import->parsed()) return cmd_import(app, opts, out);
        if (report->parsed()) return cmd_report(app, opts, out, err);
        if (add_cost->parsed()) return cmd_add_cost(app, opts, out);
        if (models_list->parsed()) return cmd_models_list(app, out);
        if (models_add->parsed()) return cmd_models_add(app, opts, out);
        if (models_rm->parsed()) return cmd_models_rm(app, opts, out, err);
        if (classify->parsed()) return cmd_classify(app, opts, out, err);
        err << cli.help();
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace tokenledger::service
