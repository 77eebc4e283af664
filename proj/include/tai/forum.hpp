#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tai/course.hpp"
#include "tai/domain.hpp"

namespace httplib {
class Server;
}

namespace tai {

struct PostedAnswer {
    std::string thread_id;
    std::string answer_id;
    std::string text;
    Timestamp posted_at{};
    std::string idempotency_key;

    bool operator==(const PostedAnswer&) const = default;
};

void to_json(nlohmann::json& j, const PostedAnswer& v);
void from_json(const nlohmann::json& j, PostedAnswer& v);

// Connection to one course's discussion forum.
class ForumConnector {
public:
    virtual ~ForumConnector() = default;

    // Unanswered posts created at or after `since`, oldest first.
    virtual std::vector<StudentPost> fetch_unanswered(Timestamp since) = 0;

    // Publishes under the TA account. Re-submitting with the same
    // idempotency_key returns the original answer id without a new answer.
    virtual std::string post_answer(const std::string& thread_id, const std::string& text,
                                    const std::string& idempotency_key) = 0;

    virtual void mark_answered(const std::string& post_id) = 0;
};

// Parses a forum fixture document: an array of post objects with exactly the
// keys post_id, thread_id, course_id, title, body, author_label, created_at,
// category, answered. Throws MalformedPayload.
std::vector<StudentPost> parse_forum_fixture(const nlohmann::json& doc);
std::vector<StudentPost> load_forum_fixture(const std::filesystem::path& path);

// Deterministic in-process forum backed by a fixture file. Answers are kept in
// memory and, when an answers file is given, appended to it one JSON document
// per line; existing answers are reloaded on construction. Posting to a thread
// marks every post in that thread answered.
class FileForum final : public ForumConnector {
public:
    enum class FailureMode {
        BeforeCommit,  // request never reaches the forum
        AfterCommit,   // forum stores the answer but the reply is lost
    };

    FileForum(ForumCredentials creds, std::vector<StudentPost> posts,
              std::optional<std::filesystem::path> answers_file = std::nullopt, Clock clock = system_now);
    FileForum(ForumCredentials creds, const std::filesystem::path& posts_file,
              std::optional<std::filesystem::path> answers_file = std::nullopt, Clock clock = system_now);

    std::vector<StudentPost> fetch_unanswered(Timestamp since) override;
    std::string post_answer(const std::string& thread_id, const std::string& text,
                            const std::string& idempotency_key) override;
    void mark_answered(const std::string& post_id) override;

    // Test hooks.
    void add_post(StudentPost post);
    void fail_fetches(int count);
    void fail_posts(int count, FailureMode mode);
    void require_token(std::string token);

    std::vector<PostedAnswer> answers() const;
    std::vector<StudentPost> posts() const;

private:
    void check_auth() const;
    void append_answer_file(const PostedAnswer& answer);

    ForumCredentials creds_;
    std::optional<std::filesystem::path> answers_file_;
    Clock clock_;
    mutable std::mutex mutex_;
    std::vector<StudentPost> posts_;
    std::vector<PostedAnswer> answers_;
    std::map<std::string, std::string> answer_by_key_;
    std::optional<std::string> required_token_;
    int failing_fetches_ = 0;
    int failing_posts_ = 0;
    FailureMode post_failure_mode_ = FailureMode::BeforeCommit;
};

// REST client for a forum exposing
//   GET  <base>/courses/<course_ref>/posts?unanswered=true&since=<rfc3339>
//   POST <base>/threads/<thread_id>/answers   {text, idempotency_key} -> {answer_id}
//   POST <base>/posts/<post_id>/answered
// with bearer-token auth.
class HttpForum final : public ForumConnector {
public:
    explicit HttpForum(ForumCredentials creds, int timeout_s = 30);

    std::vector<StudentPost> fetch_unanswered(Timestamp since) override;
    std::string post_answer(const std::string& thread_id, const std::string& text,
                            const std::string& idempotency_key) override;
    void mark_answered(const std::string& post_id) override;

private:
    ForumCredentials creds_;
    std::string origin_;
    std::string prefix_;
    int timeout_s_;
};

// Serves `forum` over the HttpForum REST contract (paths relative to
// `prefix`), accepting only `Authorization: Bearer <expected_token>`. Used as a
// local stand-in forum.
void mount_forum_routes(httplib::Server& server, FileForum& forum, const std::string& expected_token,
                        const std::string& prefix = "");

}  // namespace tai
