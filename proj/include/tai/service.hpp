#pragma once

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "tai/api.hpp"
#include "tai/course.hpp"
#include "tai/forum.hpp"
#include "tai/llm.hpp"
#include "tai/orchestrator.hpp"

namespace tai {

struct LlmSettings {
    std::string provider = "mock";  // "mock" or "openai"
    std::string base_url = "https://api.openai.com/v1";
    std::string api_token;  // TAI_LLM_TOKEN overrides
    int timeout_s = 60;
    int max_retries = 2;
};

struct ForumSettings {
    std::string kind = "file";  // "file" or "http"
    std::filesystem::path posts_file;
    std::optional<std::filesystem::path> answers_file;
};

struct CourseSettings {
    CourseConfig config;
    ForumSettings forum;
};

struct ServiceConfig {
    BindAddress bind;  // TAI_BIND overrides
    std::optional<std::filesystem::path> store_path;
    int max_generation_attempts = 3;
    int generation_concurrency = 4;
    int publish_retry_s = 5;
    LlmSettings llm;
    std::vector<ReviewerIdentity> reviewers;
    std::vector<CourseSettings> courses;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> process_env(const std::string& name);

// Config document (JSON):
// {
//   "bind": "127.0.0.1:8787",
//   "store": "data/store.jsonl",
//   "max_generation_attempts": 3, "generation_concurrency": 4, "publish_retry_s": 5,
//   "llm": {"provider": "openai", "base_url": "...", "timeout_s": 60, "max_retries": 2},
//   "reviewers": [{"actor_id": "ta1", "display_name": "TA One", "token": "...", "token_env": "..."}],
//   "courses": [{
//     "course_id": "CS180", "display_name": "CS 180", "poll_interval_s": 60,
//     "token_budget": 4096, "history_window": 3,
//     "model": {"model_id": "gpt-4", "temperature": 0.2, "max_output_tokens": 800},
//     "documents": [{"doc_id": "syllabus", "text": "..."} | {"doc_id": "hw1", "path": "docs/hw1.md"}],
//     "forum": {"kind": "file", "posts_file": "posts.json", "answers_file": "answers.jsonl",
//               "base_url": "...", "course_ref": "...", "api_token": "...", "api_token_env": "..."}
//   }]
// }
// Relative paths resolve against base_dir. Throws ConfigError.
ServiceConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                           const EnvLookup& env = process_env);
ServiceConfig load_config(const std::filesystem::path& path, const EnvLookup& env = process_env);

std::unique_ptr<LlmClient> make_llm_client(const LlmSettings& settings);
std::shared_ptr<ForumConnector> make_forum(const CourseSettings& course);

// Periodically runs poll_cycle for one course until stopped.
class PollingWorker {
public:
    PollingWorker(Orchestrator& orchestrator, std::string course_id, std::chrono::seconds interval);
    ~PollingWorker();

    void start();
    void stop();

private:
    void loop();

    Orchestrator& orchestrator_;
    std::string course_id_;
    std::chrono::seconds interval_;
    std::atomic<bool> running_{false};
    std::mutex mutex_;
    std::condition_variable cv_;
    std::thread thread_;
};

}  // namespace tai
