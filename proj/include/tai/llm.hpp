#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <string_view>

#include "tai/course.hpp"
#include "tai/error.hpp"

namespace tai {

struct Completion {
    std::string text;
    std::string model_id;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::int64_t latency_ms = 0;
    int attempts = 1;  // wire calls made, including retries
};

class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual Completion generate(std::string_view prompt, const ModelConfig& model) = 0;
};

// "MOCK(<first 8 hex of fnv1a64(prompt)>): guidance for: <first 80 code points
// of the prompt's QUESTION segment>"
std::string mock_completion_text(std::string_view prompt);

class MockLlm final : public LlmClient {
public:
    Completion generate(std::string_view prompt, const ModelConfig& model) override;

    // The next `count` calls throw Error(code) instead of answering.
    void fail_next(int count, ErrorCode code = ErrorCode::ProviderError);
    std::size_t calls() const { return calls_.load(); }

private:
    std::atomic<std::size_t> calls_{0};
    std::mutex mutex_;
    int pending_failures_ = 0;
    ErrorCode failure_code_ = ErrorCode::ProviderError;
};

struct RetryPolicy {
    int max_retries = 2;
    std::chrono::milliseconds base_delay{500};
    double factor = 2.0;
    double jitter = 0.2;  // +/- fraction applied to each delay
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Delay before retry number `retry` (0-based): base * factor^retry, scaled by a
// uniform factor in [1 - jitter, 1 + jitter].
std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int retry, std::mt19937_64& rng);

bool is_transient(ErrorCode code);

// Runs `attempt` until it succeeds, throws a non-transient Error, or the retry
// budget is spent (the last error is rethrown). `attempt` receives the 1-based
// attempt number.
template <typename F>
auto with_retry(const RetryPolicy& policy, const Sleeper& sleep, std::mt19937_64& rng, F&& attempt)
    -> decltype(attempt(1)) {
    for (int n = 1;; ++n) {
        try {
            return attempt(n);
        } catch (const Error& e) {
            if (!is_transient(e.code()) || n > policy.max_retries) throw;
        }
        sleep(backoff_delay(policy, n - 1, rng));
    }
}

struct ChatClientOptions {
    std::string base_url = "https://api.openai.com/v1";
    std::string api_token;
    std::chrono::seconds timeout{60};
    RetryPolicy retry;
    Sleeper sleeper;  // defaults to std::this_thread::sleep_for
    std::uint64_t jitter_seed = 0x5eed;
};

// OpenAI-compatible chat-completions client: POST <base_url>/chat/completions
// with a bearer token and {model, messages, temperature, max_tokens}.
class ChatCompletionsClient final : public LlmClient {
public:
    explicit ChatCompletionsClient(ChatClientOptions options);

    Completion generate(std::string_view prompt, const ModelConfig& model) override;

private:
    Completion attempt_once(const std::string& body, const ModelConfig& model);

    ChatClientOptions options_;
    std::string origin_;       // scheme://host[:port]
    std::string path_prefix_;  // e.g. /v1
    std::mutex rng_mutex_;
    std::mt19937_64 rng_;
};

}  // namespace tai
