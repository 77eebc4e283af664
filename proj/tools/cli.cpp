#include "cli.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "tai/analytics.hpp"
#include "tai/api.hpp"
#include "tai/error.hpp"
#include "tai/replay.hpp"
#include "tai/service.hpp"

namespace tai::cli {

namespace {

struct Options {
    std::string config = "tai.json";
    std::string course;
    std::string fixture;
    std::string script;
    std::string out;
    std::string store;
    std::string kind;
    std::string state;
    std::string from;
    std::string to;
    std::string survey;
};

std::unique_ptr<DocumentStore> open_store(const ServiceConfig& cfg) {
    auto store = cfg.store_path ? std::make_unique<DocumentStore>(*cfg.store_path) : std::make_unique<DocumentStore>();
    store->add_secret(cfg.llm.api_token);
    for (const auto& r : cfg.reviewers) store->add_secret(r.token);
    for (const auto& c : cfg.courses) store->add_secret(c.config.forum.api_token);
    return store;
}

int cmd_serve(const Options& o, std::ostream& out) {
    // Block termination signals before any thread starts so only the waiter sees them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    const ServiceConfig cfg = load_config(o.config);
    if (cfg.courses.empty()) fail(ErrorCode::ConfigError, "serve needs at least one course");
    if (cfg.reviewers.empty()) fail(ErrorCode::ConfigError, "serve needs at least one reviewer");

    auto store = open_store(cfg);
    auto llm = make_llm_client(cfg.llm);
    ThreadPoolScheduler scheduler(static_cast<std::size_t>(cfg.generation_concurrency));
    OrchestratorOptions options;
    options.policy.max_generation_attempts = cfg.max_generation_attempts;
    options.publish_retry_delay = std::chrono::seconds(cfg.publish_retry_s);
    Orchestrator orchestrator(*store, *llm, scheduler, system_now, options);
    for (const auto& c : cfg.courses) orchestrator.add_course(c.config, make_forum(c));
    orchestrator.resume();

    std::vector<std::unique_ptr<PollingWorker>> pollers;
    for (const auto& c : cfg.courses) {
        pollers.push_back(std::make_unique<PollingWorker>(orchestrator, c.config.course_id,
                                                          std::chrono::seconds(c.config.poll_interval_s)));
        pollers.back()->start();
    }

    ApiService api(orchestrator, cfg.reviewers);
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        api.stop();
    });
    out << "listening on " << cfg.bind.host << ':' << cfg.bind.port << std::endl;
    const bool ok = api.listen(cfg.bind);
    if (!ok) {
        pthread_kill(waiter.native_handle(), SIGTERM);
    }
    waiter.join();
    for (auto& p : pollers) p->stop();
    scheduler.stop();
    return ok ? 0 : 2;
}

int cmd_sync(const Options& o, std::ostream& out) {
    const ServiceConfig cfg = load_config(o.config);
    auto store = open_store(cfg);
    auto llm = make_llm_client(cfg.llm);
    InlineScheduler scheduler;
    OrchestratorOptions options;
    options.policy.max_generation_attempts = cfg.max_generation_attempts;
    Orchestrator orchestrator(*store, *llm, scheduler, system_now, options);
    for (const auto& c : cfg.courses) orchestrator.add_course(c.config, make_forum(c));
    if (!orchestrator.has_course(o.course)) fail(ErrorCode::ConfigError, "unknown course " + o.course);

    const auto created = orchestrator.poll_cycle(o.course);
    scheduler.drain();
    for (const auto& id : created) {
        const WorkItem item = orchestrator.load(id);
        out << id << ' ' << item.post.post_id << ' ' << to_string(item.state) << '\n';
    }
    out << "created=" << created.size() << '\n';
    return 0;
}

int cmd_replay(const Options& o, std::ostream& out) {
    const auto result = run_replay(o.fixture, load_review_script(o.script));
    out << result.report;
    return 0;
}

int cmd_export(const Options& o, std::ostream& out) {
    std::unique_ptr<DocumentStore> store;
    if (!o.store.empty()) {
        if (!std::filesystem::exists(o.store)) fail(ErrorCode::StorageFailure, "no store at " + o.store);
        store = std::make_unique<DocumentStore>(o.store);
    } else {
        store = open_store(load_config(o.config));
    }
    ExportFilter filter;
    if (!o.course.empty()) filter.course_id = o.course;
    if (!o.kind.empty()) filter.kind = record_kind_from_string(o.kind);
    if (!o.state.empty()) filter.state = o.state;
    if (!o.from.empty()) filter.from = parse_rfc3339(o.from);
    if (!o.to.empty()) filter.to = parse_rfc3339(o.to);

    std::ofstream file(o.out, std::ios::binary | std::ios::trunc);
    if (!file) fail(ErrorCode::StorageFailure, "cannot write " + o.out);
    const auto n = store->export_json(file, filter);
    out << "exported " << n << " record(s) to " << o.out << '\n';
    return 0;
}

int cmd_report(const Options& o, std::ostream& out) {
    const auto tables = analytics::aggregate_survey(analytics::survey_ingest(std::filesystem::path(o.survey)));
    for (std::size_t i = 0; i < tables.size(); ++i) {
        if (i) out << '\n';
        out << analytics::format_table(tables[i]);
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"AI teaching-assistant drafting service with mandatory human review", "tai"};
    app.require_subcommand(1);
    Options o;

    auto* serve = app.add_subcommand("serve", "Run the pollers and the reviewer HTTP API");
    serve->add_option("--config", o.config, "Config file")->required();

    auto* sync = app.add_subcommand("sync", "Run one poll cycle for a course and generate drafts");
    sync->add_option("--course", o.course, "Course id")->required();
    sync->add_option("--config", o.config, "Config file");

    auto* replay = app.add_subcommand("replay", "Replay fixture posts and scripted reviews against mocks");
    replay->add_option("--fixture", o.fixture, "Fixture directory holding posts.json")->required();
    replay->add_option("--script", o.script, "Review script (JSON array)")->required();

    auto* exp = app.add_subcommand("export", "Export stored records as newline-delimited JSON");
    exp->add_option("--out", o.out, "Output file")->required();
    exp->add_option("--course", o.course, "Only records of this course");
    exp->add_option("--kind", o.kind, "WORK_ITEM, METRICS_EVENT or SURVEY_RESPONSE");
    exp->add_option("--state", o.state, "Only work items in this state");
    exp->add_option("--from", o.from, "Earliest timestamp (RFC 3339, inclusive)");
    exp->add_option("--to", o.to, "Latest timestamp (RFC 3339, exclusive)");
    exp->add_option("--config", o.config, "Config file naming the store");
    exp->add_option("--store", o.store, "Store journal (overrides --config)");

    auto* report = app.add_subcommand("report", "Print Likert tables for a survey file");
    report->add_option("--survey", o.survey, "Survey CSV")->required();

    std::vector<const char*> argv{"tai"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (serve->parsed()) return cmd_serve(o, out);
        if (sync->parsed()) return cmd_sync(o, out);
        if (replay->parsed()) return cmd_replay(o, out);
        if (exp->parsed()) return cmd_export(o, out);
        if (report->parsed()) return cmd_report(o, out);
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    err << app.help();
    return 1;
}

}  // namespace tai::cli
