#include "tai/llm.hpp"

#include <cmath>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "tai/prompt.hpp"
#include "tai/text.hpp"

namespace tai {

namespace {

std::int64_t approx_tokens(std::string_view s) { return static_cast<std::int64_t>(prompt::estimate_tokens(s)); }

ErrorCode classify_status(int status) {
    if (status == 429) return ErrorCode::RateLimited;
    if (status == 408) return ErrorCode::Timeout;
    return ErrorCode::ProviderError;
}

bool retryable_status(int status) { return status == 408 || status == 429 || status >= 500; }

// Retryable HTTP statuses travel as Unreachable through with_retry and are
// mapped back to their own code once retries are spent.
struct RetryableStatus {
    int status;
};

}  // namespace

std::string mock_completion_text(std::string_view prompt) {
    const std::string hash = text::hex64(text::fnv1a64(prompt)).substr(0, 8);
    const std::string_view question = text::prefix_code_points(prompt::question_segment(prompt), 80);
    return "MOCK(" + hash + "): guidance for: " + std::string(question);
}

Completion MockLlm::generate(std::string_view prompt, const ModelConfig& model) {
    ++calls_;
    if (prompt.empty()) fail(ErrorCode::InvalidArgument, "prompt must not be empty");
    {
        std::lock_guard lock(mutex_);
        if (pending_failures_ > 0) {
            --pending_failures_;
            fail(failure_code_, "injected mock LLM failure");
        }
    }
    Completion c;
    c.text = mock_completion_text(prompt);
    c.model_id = model.model_id;
    c.input_tokens = approx_tokens(prompt);
    c.output_tokens = approx_tokens(c.text);
    return c;
}

void MockLlm::fail_next(int count, ErrorCode code) {
    std::lock_guard lock(mutex_);
    pending_failures_ = count;
    failure_code_ = code;
}

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int retry, std::mt19937_64& rng) {
    const double nominal = static_cast<double>(policy.base_delay.count()) * std::pow(policy.factor, retry);
    std::uniform_real_distribution<double> spread(1.0 - policy.jitter, 1.0 + policy.jitter);
    const double scaled = policy.jitter > 0 ? nominal * spread(rng) : nominal;
    return std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(scaled)));
}

bool is_transient(ErrorCode code) {
    return code == ErrorCode::RateLimited || code == ErrorCode::Timeout || code == ErrorCode::Unreachable;
}

ChatCompletionsClient::ChatCompletionsClient(ChatClientOptions options)
    : options_(std::move(options)), rng_(options_.jitter_seed) {
    const auto scheme_end = options_.base_url.find("://");
    if (scheme_end == std::string::npos) fail(ErrorCode::ConfigError, "LLM base_url needs a scheme: " + options_.base_url);
    const auto path_start = options_.base_url.find('/', scheme_end + 3);
    origin_ = options_.base_url.substr(0, path_start);
    if (path_start != std::string::npos) path_prefix_ = options_.base_url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    if (!options_.sleeper) {
        options_.sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    }
}

Completion ChatCompletionsClient::generate(std::string_view prompt, const ModelConfig& model) {
    if (prompt.empty()) fail(ErrorCode::InvalidArgument, "prompt must not be empty");
    const nlohmann::json payload = {
        {"model", model.model_id},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", std::string(prompt)}}})},
        {"temperature", model.temperature},
        {"max_tokens", model.max_output_tokens},
    };
    const std::string body = payload.dump();

    std::lock_guard lock(rng_mutex_);
    int last_status = 0;
    try {
        return with_retry(options_.retry, options_.sleeper, rng_, [&](int n) {
            last_status = 0;
            try {
                Completion c = attempt_once(body, model);
                c.attempts = n;
                return c;
            } catch (const RetryableStatus& s) {
                last_status = s.status;
                throw Error(ErrorCode::Unreachable, "HTTP " + std::to_string(s.status));
            }
        });
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Unreachable && last_status != 0) {
            fail(classify_status(last_status), "chat completion failed after retries: HTTP " +
                                                   std::to_string(last_status));
        }
        throw;
    }
}

Completion ChatCompletionsClient::attempt_once(const std::string& body, const ModelConfig& model) {
    httplib::Client client(origin_);
    const auto secs = static_cast<time_t>(options_.timeout.count());
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);
    client.set_write_timeout(secs, 0);
    if (!options_.api_token.empty()) client.set_bearer_token_auth(options_.api_token);

    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(path_prefix_ + "/chat/completions", body, "application/json");
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);

    if (!res) {
        const auto err = res.error();
        if (err == httplib::Error::Read || err == httplib::Error::Write || err == httplib::Error::ConnectionTimeout) {
            fail(ErrorCode::Timeout, "chat completion timed out: " + httplib::to_string(err));
        }
        fail(ErrorCode::Unreachable, "chat completion transport error: " + httplib::to_string(err));
    }
    if (res->status < 200 || res->status >= 300) {
        if (retryable_status(res->status)) throw RetryableStatus{res->status};
        fail(ErrorCode::ProviderError, "chat completion rejected: HTTP " + std::to_string(res->status));
    }

    const auto doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
        fail(ErrorCode::ProviderError, "chat completion response has no choices");
    }
    const auto& message = doc["choices"][0].value("message", nlohmann::json::object());
    const auto content = message.value("content", nlohmann::json(nullptr));
    if (!content.is_string() || content.get<std::string>().empty()) {
        fail(ErrorCode::EmptyCompletion, "chat completion returned no content");
    }

    Completion c;
    c.text = content.get<std::string>();
    c.model_id = doc.value("model", model.model_id);
    c.latency_ms = elapsed.count();
    if (const auto usage = doc.find("usage"); usage != doc.end() && usage->is_object()) {
        c.input_tokens = usage->value("prompt_tokens", std::int64_t{0});
        c.output_tokens = usage->value("completion_tokens", std::int64_t{0});
    }
    return c;
}

}  // namespace tai
