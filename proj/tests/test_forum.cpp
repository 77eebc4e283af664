#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <thread>

#include <unistd.h>

#include "support/http_stub.hpp"
#include "tai/error.hpp"
#include "tai/forum.hpp"

using namespace tai;
using namespace std::chrono_literals;

namespace {

const std::filesystem::path kFixtures = TAI_TEST_DATA;

ForumCredentials creds(std::string course = "CS180") {
    ForumCredentials c;
    c.base_url = "file://fixture";
    c.api_token = "tok";
    c.course_ref = std::move(course);
    return c;
}

Timestamp at(const char* text) { return parse_rfc3339(text); }

StudentPost make_post(int i, Timestamp created, bool answered, std::string course = "CS180") {
    StudentPost p;
    p.post_id = "p" + std::to_string(i);
    p.thread_id = "t" + std::to_string(i);
    p.course_id = std::move(course);
    p.title = "title " + std::to_string(i);
    p.body = "body " + std::to_string(i);
    p.author_label = "anon";
    p.created_at = created;
    p.answered = answered;
    return p;
}

std::filesystem::path temp_file(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("tai_forum_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove(p);
    return p;
}

}  // namespace

TEST_CASE("fixture forum returns unanswered posts oldest first") {
    FileForum forum(creds(), kFixtures / "forum_small.json");
    const auto posts = forum.fetch_unanswered(at("2024-02-01T00:00:00Z"));
    REQUIRE(posts.size() == 2);
    CHECK(posts[0].post_id == "p3");
    CHECK(posts[1].post_id == "p1");
    CHECK(posts[0].category == std::optional<std::string>("hw1"));

    CHECK(forum.fetch_unanswered(at("2024-03-01T00:00:00Z")).empty());
    // since is inclusive
    const auto exact = forum.fetch_unanswered(at("2024-02-01T10:00:00Z"));
    REQUIRE(exact.size() == 1);
    CHECK(exact[0].post_id == "p1");
}

TEST_CASE("fetch filter agrees with a brute-force scan") {
    std::mt19937 rng(42);
    const Timestamp base = at("2024-01-01T00:00:00Z");
    std::vector<StudentPost> posts;
    for (int i = 0; i < 20; ++i) {
        const auto offset = std::chrono::seconds(rng() % 10000);
        posts.push_back(make_post(i, base + offset, rng() % 3 == 0, rng() % 4 == 0 ? "OTHER" : "CS180"));
    }
    FileForum forum(creds(), posts);
    for (int trial = 0; trial < 50; ++trial) {
        const Timestamp since = base + std::chrono::seconds(rng() % 11000);
        std::vector<std::string> expected;
        std::vector<StudentPost> sorted = posts;
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const auto& a, const auto& b) { return a.created_at < b.created_at; });
        for (const auto& p : sorted) {
            if (!p.answered && p.course_id == "CS180" && p.created_at >= since) expected.push_back(p.post_id);
        }
        std::vector<std::string> got;
        for (const auto& p : forum.fetch_unanswered(since)) got.push_back(p.post_id);
        CHECK(got == expected);
    }
}

TEST_CASE("posting is idempotent per key and marks the thread answered") {
    FileForum forum(creds(), kFixtures / "forum_small.json");
    const std::string id1 = forum.post_answer("t1", "Think about sizeof(int).", "itm-1");
    const std::string id2 = forum.post_answer("t1", "Think about sizeof(int).", "itm-1");
    CHECK(id1 == id2);
    CHECK(forum.answers().size() == 1);
    const auto left = forum.fetch_unanswered(Timestamp{});
    REQUIRE(left.size() == 1);
    CHECK(left[0].post_id == "p3");

    try {
        forum.post_answer("nope", "text", "k");
        FAIL("expected ThreadNotFound");
    } catch (const tai::Error& e) {
        CHECK(e.code() == ErrorCode::ThreadNotFound);
    }
}

TEST_CASE("concurrent duplicate posts produce one answer") {
    FileForum forum(creds(), kFixtures / "forum_small.json");
    std::vector<std::thread> threads;
    std::vector<std::string> ids(8);
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&, i] { ids[static_cast<std::size_t>(i)] = forum.post_answer("t3", "hint", "same-key"); });
    }
    for (auto& t : threads) t.join();
    CHECK(forum.answers().size() == 1);
    CHECK(std::all_of(ids.begin(), ids.end(), [&](const auto& id) { return id == ids[0]; }));
}

TEST_CASE("lost reply after commit is recovered by retrying with the same key") {
    FileForum forum(creds(), kFixtures / "forum_small.json");
    forum.fail_posts(1, FileForum::FailureMode::AfterCommit);
    CHECK_THROWS_AS(forum.post_answer("t1", "hint", "k1"), tai::Error);
    CHECK(forum.answers().size() == 1);
    forum.post_answer("t1", "hint", "k1");
    CHECK(forum.answers().size() == 1);

    forum.fail_posts(1, FileForum::FailureMode::BeforeCommit);
    CHECK_THROWS_AS(forum.post_answer("t3", "hint", "k3"), tai::Error);
    CHECK(forum.answers().size() == 1);
}

TEST_CASE("token mismatch is an auth failure") {
    FileForum forum(creds(), kFixtures / "forum_small.json");
    forum.require_token("other");
    try {
        forum.fetch_unanswered(Timestamp{});
        FAIL("expected AuthFailed");
    } catch (const tai::Error& e) {
        CHECK(e.code() == ErrorCode::AuthFailed);
    }
}

TEST_CASE("malformed fixtures are rejected") {
    auto code_of = [](const nlohmann::json& doc) {
        try {
            parse_forum_fixture(doc);
        } catch (const tai::Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    nlohmann::json good = nlohmann::json::parse(R"([{"post_id":"p","thread_id":"t","course_id":"c","title":"x",
        "body":"y","author_label":"a","created_at":"2024-01-01T00:00:00Z","category":null,"answered":false}])");
    CHECK_NOTHROW(parse_forum_fixture(good));

    auto missing = good;
    missing[0].erase("thread_id");
    CHECK(code_of(missing) == ErrorCode::MalformedPayload);
    auto extra = good;
    extra[0]["surprise"] = 1;
    CHECK(code_of(extra) == ErrorCode::MalformedPayload);
    auto bad_time = good;
    bad_time[0]["created_at"] = "yesterday";
    CHECK(code_of(bad_time) == ErrorCode::MalformedPayload);
    CHECK(code_of(nlohmann::json::object()) == ErrorCode::MalformedPayload);
}

TEST_CASE("answers file survives a restart") {
    const auto path = temp_file("answers");
    {
        FileForum forum(creds(), kFixtures / "forum_small.json", path);
        forum.post_answer("t1", "hint", "k1");
    }
    FileForum again(creds(), kFixtures / "forum_small.json", path);
    CHECK(again.answers().size() == 1);
    CHECK(again.post_answer("t1", "hint", "k1") == again.answers()[0].answer_id);
    CHECK(again.answers().size() == 1);
    CHECK(again.fetch_unanswered(Timestamp{}).size() == 1);
    std::filesystem::remove(path);
}

TEST_CASE("http forum client against the stand-in REST forum") {
    FileForum backing(creds(), kFixtures / "forum_small.json");
    StubServer stub;
    mount_forum_routes(stub.server(), backing, "secret-token", "/api");
    stub.start();

    ForumCredentials c = creds();
    c.base_url = stub.url("/api");
    c.api_token = "secret-token";
    HttpForum forum(c, 5);

    const auto posts = forum.fetch_unanswered(at("2024-02-01T00:00:00Z"));
    REQUIRE(posts.size() == 2);
    CHECK(posts[0].post_id == "p3");

    const auto id = forum.post_answer("t3", "Check your free order.", "itm-x");
    CHECK(forum.post_answer("t3", "Check your free order.", "itm-x") == id);
    CHECK(backing.answers().size() == 1);
    forum.mark_answered("p1");
    CHECK(forum.fetch_unanswered(Timestamp{}).empty());

    auto code_of = [](auto&& fn) {
        try {
            fn();
        } catch (const tai::Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    CHECK(code_of([&] { forum.post_answer("missing", "x", "k"); }) == ErrorCode::ThreadNotFound);

    c.api_token = "wrong";
    HttpForum bad(c, 5);
    CHECK(code_of([&] { bad.fetch_unanswered(Timestamp{}); }) == ErrorCode::AuthFailed);

    stub.stop();
    CHECK(code_of([&] { forum.fetch_unanswered(Timestamp{}); }) == ErrorCode::Unreachable);
}
