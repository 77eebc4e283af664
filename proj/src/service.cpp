#include "tai/service.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "tai/error.hpp"

namespace tai {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::ConfigError, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string secret(const json& obj, const char* literal_key, const char* env_key, const EnvLookup& env) {
    if (const auto it = obj.find(env_key); it != obj.end() && it->is_string()) {
        if (auto value = env(it->get<std::string>())) return *value;
    }
    return obj.value(literal_key, std::string());
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
    if (const char* v = std::getenv(name.c_str()); v && *v) return std::string(v);
    return std::nullopt;
}

ServiceConfig parse_config(const json& doc, const std::filesystem::path& base_dir, const EnvLookup& env) {
    if (!doc.is_object()) fail(ErrorCode::ConfigError, "config must be a JSON object");
    ServiceConfig cfg;
    try {
        cfg.bind = parse_bind_address(env("TAI_BIND").value_or(doc.value("bind", std::string("127.0.0.1:8787"))));
        if (doc.contains("store")) cfg.store_path = resolve(base_dir, doc.at("store").get<std::string>());
        cfg.max_generation_attempts = doc.value("max_generation_attempts", 3);
        cfg.generation_concurrency = doc.value("generation_concurrency", 4);
        cfg.publish_retry_s = doc.value("publish_retry_s", 5);

        const json llm = doc.value("llm", json::object());
        cfg.llm.provider = llm.value("provider", std::string("mock"));
        cfg.llm.base_url = llm.value("base_url", cfg.llm.base_url);
        cfg.llm.timeout_s = llm.value("timeout_s", 60);
        cfg.llm.max_retries = llm.value("max_retries", 2);
        cfg.llm.api_token = env("TAI_LLM_TOKEN").value_or(llm.value("api_token", std::string()));
        if (cfg.llm.provider != "mock" && cfg.llm.provider != "openai") {
            fail(ErrorCode::ConfigError, "llm.provider must be \"mock\" or \"openai\"");
        }

        for (const auto& r : doc.value("reviewers", json::array())) {
            ReviewerIdentity who{r.at("actor_id").get<std::string>(), r.value("display_name", std::string()),
                                 secret(r, "token", "token_env", env)};
            if (who.actor_id.empty() || who.token.empty()) {
                fail(ErrorCode::ConfigError, "reviewer entries need actor_id and a token");
            }
            cfg.reviewers.push_back(std::move(who));
        }

        std::set<std::string> course_ids;
        for (const auto& c : doc.value("courses", json::array())) {
            CourseSettings course;
            CourseConfig& cc = course.config;
            cc.course_id = c.at("course_id").get<std::string>();
            cc.display_name = c.value("display_name", std::string());
            cc.poll_interval_s = c.value("poll_interval_s", 60);
            cc.token_budget = c.value("token_budget", 4096);
            cc.history_window = c.value("history_window", 3);
            const json model = c.value("model", json::object());
            cc.model.model_id = model.value("model_id", cc.model.model_id);
            cc.model.temperature = model.value("temperature", cc.model.temperature);
            cc.model.max_output_tokens = model.value("max_output_tokens", cc.model.max_output_tokens);
            for (const auto& d : c.value("documents", json::array())) {
                CourseDocument doc_entry{d.at("doc_id").get<std::string>(), {}};
                if (d.contains("path")) {
                    doc_entry.text = read_file(resolve(base_dir, d.at("path").get<std::string>()));
                } else {
                    doc_entry.text = d.at("text").get<std::string>();
                }
                cc.documents.push_back(std::move(doc_entry));
            }
            const json forum = c.value("forum", json::object());
            course.forum.kind = forum.value("kind", std::string("file"));
            cc.forum.base_url = forum.value("base_url", std::string());
            cc.forum.course_ref = forum.value("course_ref", cc.course_id);
            cc.forum.api_token = secret(forum, "api_token", "api_token_env", env);
            if (course.forum.kind == "file") {
                course.forum.posts_file = resolve(base_dir, forum.at("posts_file").get<std::string>());
                if (forum.contains("answers_file")) {
                    course.forum.answers_file = resolve(base_dir, forum.at("answers_file").get<std::string>());
                }
            } else if (course.forum.kind != "http") {
                fail(ErrorCode::ConfigError, "forum.kind must be \"file\" or \"http\"");
            }
            validate(cc);
            if (!course_ids.insert(cc.course_id).second) {
                fail(ErrorCode::ConfigError, "duplicate course " + cc.course_id);
            }
            cfg.courses.push_back(std::move(course));
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("config: ") + e.what());
    }
    if (cfg.max_generation_attempts < 1) fail(ErrorCode::ConfigError, "max_generation_attempts must be >= 1");
    if (cfg.generation_concurrency < 1) fail(ErrorCode::ConfigError, "generation_concurrency must be >= 1");
    return cfg;
}

ServiceConfig load_config(const std::filesystem::path& path, const EnvLookup& env) {
    const json doc = json::parse(read_file(path), nullptr, false);
    if (doc.is_discarded()) fail(ErrorCode::ConfigError, path.string() + " is not valid JSON");
    return parse_config(doc, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."), env);
}

std::unique_ptr<LlmClient> make_llm_client(const LlmSettings& settings) {
    if (settings.provider == "mock") return std::make_unique<MockLlm>();
    ChatClientOptions options;
    options.base_url = settings.base_url;
    options.api_token = settings.api_token;
    options.timeout = std::chrono::seconds(settings.timeout_s);
    options.retry.max_retries = settings.max_retries;
    return std::make_unique<ChatCompletionsClient>(std::move(options));
}

std::shared_ptr<ForumConnector> make_forum(const CourseSettings& course) {
    if (course.forum.kind == "http") return std::make_shared<HttpForum>(course.config.forum);
    return std::make_shared<FileForum>(course.config.forum, course.forum.posts_file, course.forum.answers_file);
}

PollingWorker::PollingWorker(Orchestrator& orchestrator, std::string course_id, std::chrono::seconds interval)
    : orchestrator_(orchestrator), course_id_(std::move(course_id)), interval_(interval) {}

PollingWorker::~PollingWorker() { stop(); }

void PollingWorker::start() {
    if (!running_.exchange(true)) thread_ = std::thread(&PollingWorker::loop, this);
}

void PollingWorker::stop() {
    if (running_.exchange(false)) {
        cv_.notify_one();
        if (thread_.joinable()) thread_.join();
    }
}

void PollingWorker::loop() {
    while (running_) {
        try {
            const auto created = orchestrator_.poll_cycle(course_id_);
            if (!created.empty()) {
                std::cerr << "[" << course_id_ << "] picked up " << created.size() << " new post(s)\n";
            }
        } catch (const Error& e) {
            std::cerr << "[" << course_id_ << "] " << e.what() << '\n';
        }
        std::unique_lock lock(mutex_);
        cv_.wait_for(lock, interval_, [this] { return !running_; });
    }
}

}  // namespace tai
