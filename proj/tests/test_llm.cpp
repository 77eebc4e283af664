#include <doctest.h>

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "support/http_stub.hpp"
#include "tai/llm.hpp"
#include "tai/prompt.hpp"

using namespace tai;
using namespace std::chrono_literals;

namespace {

// Reference FNV-1a, written out from the published offset basis and prime.
std::uint64_t fnv_oracle(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex8(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return out.substr(0, 8);
}

std::string rendered(const std::string& body) {
    StudentPost p;
    p.post_id = "p";
    p.thread_id = "t";
    p.course_id = "C";
    p.title = "T";
    p.body = body;
    CourseConfig c;
    c.course_id = "C";
    return prompt::render(prompt::build_base_prompt(c, p));
}

nlohmann::json ok_body(const std::string& content) {
    return {{"model", "stub-model"},
            {"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}},
            {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 7}}}};
}

ChatClientOptions client_options(const StubServer& stub, std::vector<std::chrono::milliseconds>* sleeps) {
    ChatClientOptions o;
    o.base_url = stub.url("/v1");
    o.api_token = "sk-test";
    o.timeout = 5s;
    o.sleeper = [sleeps](std::chrono::milliseconds d) { sleeps->push_back(d); };
    return o;
}

}  // namespace

TEST_CASE("mock output is deterministic and keyed on the prompt hash") {
    const std::string prompt = rendered("How do I free a linked list?");
    MockLlm llm;
    const Completion a = llm.generate(prompt, {});
    const Completion b = llm.generate(prompt, {});
    CHECK(a.text == b.text);
    CHECK(a.text == "MOCK(" + hex8(fnv_oracle(prompt)) + "): guidance for: Title: T\n\nHow do I free a linked list?");
    CHECK(llm.calls() == 2);

    const Completion c = llm.generate(rendered("How do I free a linked lisT?"), {});
    CHECK(c.text != a.text);
}

TEST_CASE("mock question excerpt is capped at 80 code points") {
    std::string body;
    for (int i = 0; i < 100; ++i) body += "\xc3\xa9";  // U+00E9
    const std::string text = mock_completion_text(rendered(body));
    const std::string prefix = "): guidance for: ";
    const std::string tail = text.substr(text.find(prefix) + prefix.size());
    // "Title: T\n\n" is 10 code points, leaving 70 two-byte characters.
    CHECK(tail.size() == 10 + 70 * 2);
}

TEST_CASE("mock failure injection") {
    MockLlm llm;
    llm.fail_next(2, ErrorCode::Timeout);
    for (int i = 0; i < 2; ++i) {
        try {
            llm.generate("x", {});
            FAIL("expected failure");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Timeout);
        }
    }
    CHECK_NOTHROW(llm.generate("x", {}));
}

TEST_CASE("backoff delays grow geometrically within the jitter band") {
    RetryPolicy p;
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        for (int n = 0; n < 4; ++n) {
            const double nominal = 500.0 * (1 << n);
            const auto d = backoff_delay(p, n, rng).count();
            CHECK(d >= static_cast<long>(nominal * 0.8) - 1);
            CHECK(d <= static_cast<long>(nominal * 1.2) + 1);
        }
    }
    p.jitter = 0;
    CHECK(backoff_delay(p, 2, rng) == 2000ms);
}

TEST_CASE("with_retry stops on success, permanent errors, and exhausted budgets") {
    RetryPolicy p;
    std::mt19937_64 rng(1);
    std::vector<std::chrono::milliseconds> sleeps;
    Sleeper sleep = [&](std::chrono::milliseconds d) { sleeps.push_back(d); };

    int calls = 0;
    CHECK(with_retry(p, sleep, rng, [&](int n) {
              ++calls;
              if (n < 3) fail(ErrorCode::RateLimited, "slow down");
              return n;
          }) == 3);
    CHECK(calls == 3);
    CHECK(sleeps.size() == 2);

    calls = 0;
    CHECK_THROWS_AS(with_retry(p, sleep, rng,
                               [&](int) -> int {
                                   ++calls;
                                   fail(ErrorCode::AuthFailed, "bad token");
                               }),
                    Error);
    CHECK(calls == 1);

    calls = 0;
    try {
        with_retry(p, sleep, rng, [&](int) -> int {
            ++calls;
            fail(ErrorCode::Timeout, "slow");
        });
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Timeout);
    }
    CHECK(calls == 1 + p.max_retries);
}

TEST_CASE("chat client retries transient provider errors") {
    StubServer stub;
    std::atomic<int> hits{0};
    std::string seen_auth;
    nlohmann::json seen_body;
    stub.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        seen_body = nlohmann::json::parse(req.body);
        if (++hits <= 2) {
            res.status = 503;
            return;
        }
        res.set_content(ok_body("Think about the base case.").dump(), "application/json");
    });
    stub.start();

    std::vector<std::chrono::milliseconds> sleeps;
    ChatCompletionsClient client(client_options(stub, &sleeps));
    ModelConfig model;
    model.model_id = "gpt-4";
    const Completion c = client.generate("prompt text", model);
    CHECK(c.text == "Think about the base case.");
    CHECK(c.attempts == 3);
    CHECK(c.model_id == "stub-model");
    CHECK(c.input_tokens == 11);
    CHECK(c.output_tokens == 7);
    CHECK(hits == 3);
    CHECK(sleeps.size() == 2);
    CHECK(seen_auth == "Bearer sk-test");
    CHECK(seen_body["model"] == "gpt-4");
    CHECK(seen_body["messages"][0]["content"] == "prompt text");
    CHECK(seen_body["max_tokens"] == 800);
}

TEST_CASE("chat client maps failures to error codes") {
    StubServer stub;
    std::atomic<int> hits{0};
    int status = 400;
    std::string content;
    stub.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        if (status != 200) {
            res.status = status;
            return;
        }
        res.set_content(ok_body(content).dump(), "application/json");
    });
    stub.start();
    std::vector<std::chrono::milliseconds> sleeps;
    ChatCompletionsClient client(client_options(stub, &sleeps));

    auto code_of = [&]() {
        try {
            client.generate("p", {});
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };

    SUBCASE("4xx is permanent") {
        CHECK(code_of() == ErrorCode::ProviderError);
        CHECK(hits == 1);
    }
    SUBCASE("429 retried then surfaced as rate limiting") {
        status = 429;
        CHECK(code_of() == ErrorCode::RateLimited);
        CHECK(hits == 3);
    }
    SUBCASE("5xx retried then surfaced as provider error") {
        status = 500;
        CHECK(code_of() == ErrorCode::ProviderError);
        CHECK(hits == 3);
    }
    SUBCASE("empty content") {
        status = 200;
        CHECK(code_of() == ErrorCode::EmptyCompletion);
        CHECK(hits == 1);
    }
}

TEST_CASE("chat client reports unreachable provider") {
    ChatClientOptions o;
    o.base_url = "http://127.0.0.1:1/v1";
    o.timeout = 1s;
    o.sleeper = [](std::chrono::milliseconds) {};
    ChatCompletionsClient client(o);
    try {
        client.generate("p", {});
        FAIL("expected failure");
    } catch (const Error& e) {
        CHECK((e.code() == ErrorCode::Unreachable || e.code() == ErrorCode::Timeout));
    }
}
