#include "tai/forum.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <httplib.h>

#include "tai/codec.hpp"
#include "tai/error.hpp"

namespace tai {

using nlohmann::json;

namespace {

const std::set<std::string> kFixtureKeys = {"post_id",      "thread_id",  "course_id", "title",   "body",
                                            "author_label", "created_at", "category",  "answered"};

std::vector<StudentPost> unanswered_since(const std::vector<StudentPost>& posts, const std::string& course_ref,
                                          Timestamp since) {
    std::vector<StudentPost> out;
    for (const auto& p : posts) {
        if (p.answered || p.created_at < since) continue;
        if (!course_ref.empty() && p.course_id != course_ref) continue;
        out.push_back(p);
    }
    std::stable_sort(out.begin(), out.end(), [](const StudentPost& a, const StudentPost& b) {
        return a.created_at != b.created_at ? a.created_at < b.created_at : a.post_id < b.post_id;
    });
    return out;
}

std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) fail(ErrorCode::ConfigError, "forum base_url needs a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    std::string origin = url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {origin, prefix};
}

}  // namespace

void to_json(json& j, const PostedAnswer& v) {
    j = json{{"thread_id", v.thread_id},
             {"answer_id", v.answer_id},
             {"text", v.text},
             {"posted_at", format_rfc3339(v.posted_at)},
             {"idempotency_key", v.idempotency_key}};
}

void from_json(const json& j, PostedAnswer& v) {
    v.thread_id = j.at("thread_id").get<std::string>();
    v.answer_id = j.at("answer_id").get<std::string>();
    v.text = j.at("text").get<std::string>();
    v.posted_at = parse_rfc3339(j.at("posted_at").get<std::string>());
    v.idempotency_key = j.at("idempotency_key").get<std::string>();
}

std::vector<StudentPost> parse_forum_fixture(const json& doc) {
    if (!doc.is_array()) fail(ErrorCode::MalformedPayload, "forum fixture must be an array of posts");
    std::vector<StudentPost> posts;
    std::set<std::pair<std::string, std::string>> ids;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& entry = doc[i];
        const std::string where = "forum fixture entry " + std::to_string(i);
        if (!entry.is_object()) fail(ErrorCode::MalformedPayload, where + " is not an object");
        for (const auto& key : kFixtureKeys) {
            if (!entry.contains(key)) fail(ErrorCode::MalformedPayload, where + " lacks \"" + key + "\"");
        }
        for (const auto& [key, _] : entry.items()) {
            if (!kFixtureKeys.count(key)) fail(ErrorCode::MalformedPayload, where + " has unknown key \"" + key + "\"");
        }
        StudentPost post;
        try {
            post = entry.get<StudentPost>();
            validate(post);
        } catch (const Error& e) {
            fail(ErrorCode::MalformedPayload, where + ": " + e.what());
        } catch (const json::exception& e) {
            fail(ErrorCode::MalformedPayload, where + ": " + e.what());
        }
        if (!ids.emplace(post.course_id, post.post_id).second) {
            fail(ErrorCode::MalformedPayload, where + ": duplicate post_id " + post.post_id);
        }
        posts.push_back(std::move(post));
    }
    return posts;
}

std::vector<StudentPost> load_forum_fixture(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Unreachable, "cannot open forum fixture " + path.string());
    const json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) fail(ErrorCode::MalformedPayload, "forum fixture " + path.string() + " is not valid JSON");
    return parse_forum_fixture(doc);
}

FileForum::FileForum(ForumCredentials creds, std::vector<StudentPost> posts,
                     std::optional<std::filesystem::path> answers_file, Clock clock)
    : creds_(std::move(creds)), answers_file_(std::move(answers_file)), clock_(std::move(clock)),
      posts_(std::move(posts)) {
    if (!answers_file_ || !std::filesystem::exists(*answers_file_)) return;
    std::ifstream in(*answers_file_);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json doc = json::parse(line, nullptr, false);
        if (doc.is_discarded()) fail(ErrorCode::MalformedPayload, "bad line in " + answers_file_->string());
        auto answer = doc.get<PostedAnswer>();
        answer_by_key_[answer.idempotency_key] = answer.answer_id;
        for (auto& p : posts_) {
            if (p.thread_id == answer.thread_id) p.answered = true;
        }
        answers_.push_back(std::move(answer));
    }
}

FileForum::FileForum(ForumCredentials creds, const std::filesystem::path& posts_file,
                     std::optional<std::filesystem::path> answers_file, Clock clock)
    : FileForum(std::move(creds), load_forum_fixture(posts_file), std::move(answers_file), std::move(clock)) {}

void FileForum::check_auth() const {
    if (required_token_ && *required_token_ != creds_.api_token) fail(ErrorCode::AuthFailed, "forum rejected token");
}

std::vector<StudentPost> FileForum::fetch_unanswered(Timestamp since) {
    std::lock_guard lock(mutex_);
    check_auth();
    if (failing_fetches_ > 0) {
        --failing_fetches_;
        fail(ErrorCode::Unreachable, "injected forum fetch failure");
    }
    return unanswered_since(posts_, creds_.course_ref, since);
}

std::string FileForum::post_answer(const std::string& thread_id, const std::string& text,
                                   const std::string& idempotency_key) {
    std::lock_guard lock(mutex_);
    check_auth();
    if (text.empty()) fail(ErrorCode::InvalidArgument, "answer text must not be empty");

    bool lose_reply = false;
    if (failing_posts_ > 0) {
        --failing_posts_;
        if (post_failure_mode_ == FailureMode::BeforeCommit) {
            fail(ErrorCode::Unreachable, "injected forum post failure");
        }
        lose_reply = true;
    }

    if (const auto it = answer_by_key_.find(idempotency_key); it != answer_by_key_.end()) {
        if (lose_reply) fail(ErrorCode::Unreachable, "injected lost reply");
        return it->second;
    }
    const bool thread_exists = std::any_of(posts_.begin(), posts_.end(),
                                           [&](const StudentPost& p) { return p.thread_id == thread_id; });
    if (!thread_exists) fail(ErrorCode::ThreadNotFound, "no thread " + thread_id);

    PostedAnswer answer{thread_id, "ans-" + std::to_string(answers_.size() + 1), text, clock_(), idempotency_key};
    append_answer_file(answer);
    answer_by_key_[idempotency_key] = answer.answer_id;
    for (auto& p : posts_) {
        if (p.thread_id == thread_id) p.answered = true;
    }
    answers_.push_back(answer);
    if (lose_reply) fail(ErrorCode::Unreachable, "injected lost reply");
    return answer.answer_id;
}

void FileForum::mark_answered(const std::string& post_id) {
    std::lock_guard lock(mutex_);
    check_auth();
    for (auto& p : posts_) {
        if (p.post_id == post_id) p.answered = true;
    }
}

void FileForum::append_answer_file(const PostedAnswer& answer) {
    if (!answers_file_) return;
    std::ofstream out(*answers_file_, std::ios::app);
    out << json(answer).dump() << '\n';
    out.flush();
    if (!out) fail(ErrorCode::Unreachable, "cannot append to " + answers_file_->string());
}

void FileForum::add_post(StudentPost post) {
    std::lock_guard lock(mutex_);
    posts_.push_back(std::move(post));
}

void FileForum::fail_fetches(int count) {
    std::lock_guard lock(mutex_);
    failing_fetches_ = count;
}

void FileForum::fail_posts(int count, FailureMode mode) {
    std::lock_guard lock(mutex_);
    failing_posts_ = count;
    post_failure_mode_ = mode;
}

void FileForum::require_token(std::string token) {
    std::lock_guard lock(mutex_);
    required_token_ = std::move(token);
}

std::vector<PostedAnswer> FileForum::answers() const {
    std::lock_guard lock(mutex_);
    return answers_;
}

std::vector<StudentPost> FileForum::posts() const {
    std::lock_guard lock(mutex_);
    return posts_;
}

HttpForum::HttpForum(ForumCredentials creds, int timeout_s) : creds_(std::move(creds)), timeout_s_(timeout_s) {
    std::tie(origin_, prefix_) = split_url(creds_.base_url);
}

namespace {

httplib::Client make_client(const std::string& origin, const std::string& token, int timeout_s) {
    httplib::Client client(origin);
    client.set_connection_timeout(timeout_s, 0);
    client.set_read_timeout(timeout_s, 0);
    client.set_write_timeout(timeout_s, 0);
    client.set_bearer_token_auth(token);
    return client;
}

void check_response(const httplib::Result& res, const std::string& what) {
    if (!res) fail(ErrorCode::Unreachable, what + ": " + httplib::to_string(res.error()));
    if (res->status == 401 || res->status == 403) fail(ErrorCode::AuthFailed, what + ": forum rejected token");
    if (res->status == 404) fail(ErrorCode::ThreadNotFound, what + ": not found");
    if (res->status >= 500) fail(ErrorCode::Unreachable, what + ": HTTP " + std::to_string(res->status));
    if (res->status < 200 || res->status >= 300) {
        fail(ErrorCode::MalformedPayload, what + ": unexpected HTTP " + std::to_string(res->status));
    }
}

}  // namespace

std::vector<StudentPost> HttpForum::fetch_unanswered(Timestamp since) {
    auto client = make_client(origin_, creds_.api_token, timeout_s_);
    const httplib::Params params{{"unanswered", "true"}, {"since", format_rfc3339(since)}};
    auto res = client.Get(prefix_ + "/courses/" + creds_.course_ref + "/posts", params, httplib::Headers{});
    check_response(res, "fetch posts");
    const json doc = json::parse(res->body, nullptr, false);
    if (doc.is_discarded()) fail(ErrorCode::MalformedPayload, "forum returned invalid JSON");
    return unanswered_since(parse_forum_fixture(doc), creds_.course_ref, since);
}

std::string HttpForum::post_answer(const std::string& thread_id, const std::string& text,
                                   const std::string& idempotency_key) {
    auto client = make_client(origin_, creds_.api_token, timeout_s_);
    const json body = {{"text", text}, {"idempotency_key", idempotency_key}};
    auto res = client.Post(prefix_ + "/threads/" + thread_id + "/answers",
                           httplib::Headers{{"Idempotency-Key", idempotency_key}}, body.dump(), "application/json");
    check_response(res, "post answer");
    const json doc = json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("answer_id") || !doc["answer_id"].is_string()) {
        fail(ErrorCode::MalformedPayload, "forum reply lacks answer_id");
    }
    return doc["answer_id"].get<std::string>();
}

void HttpForum::mark_answered(const std::string& post_id) {
    auto client = make_client(origin_, creds_.api_token, timeout_s_);
    auto res = client.Post(prefix_ + "/posts/" + post_id + "/answered", "", "application/json");
    check_response(res, "mark answered");
}

void mount_forum_routes(httplib::Server& server, FileForum& forum, const std::string& expected_token,
                        const std::string& prefix) {
    auto respond_error = [](httplib::Response& res, const Error& e) {
        switch (e.code()) {
        case ErrorCode::AuthFailed: res.status = 401; break;
        case ErrorCode::ThreadNotFound: res.status = 404; break;
        case ErrorCode::InvalidArgument: res.status = 400; break;
        default: res.status = 503; break;
        }
        res.set_content(json{{"error", to_string(e.code())}, {"message", e.what()}}.dump(), "application/json");
    };
    auto authorized = [expected = "Bearer " + expected_token](const httplib::Request& req, httplib::Response& res) {
        if (req.get_header_value("Authorization") == expected) return true;
        res.status = 401;
        res.set_content(json{{"error", "AuthFailed"}, {"message", "bad forum token"}}.dump(), "application/json");
        return false;
    };

    server.Get(prefix + R"(/courses/([^/]+)/posts)", [&forum, respond_error, authorized](const httplib::Request& req,
                                                                                          httplib::Response& res) {
        if (!authorized(req, res)) return;
        try {
            Timestamp since{};
            if (req.has_param("since")) since = parse_rfc3339(req.get_param_value("since"));
            json out = json::array();
            for (const auto& p : forum.fetch_unanswered(since)) {
                if (p.course_id == req.matches[1]) out.push_back(p);
            }
            res.set_content(out.dump(), "application/json");
        } catch (const Error& e) {
            respond_error(res, e);
        }
    });
    server.Post(prefix + R"(/threads/([^/]+)/answers)", [&forum, respond_error, authorized](
                                                            const httplib::Request& req, httplib::Response& res) {
        if (!authorized(req, res)) return;
        try {
            const json body = json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.contains("text")) fail(ErrorCode::InvalidArgument, "bad body");
            std::string key = req.get_header_value("Idempotency-Key");
            if (key.empty()) key = body.value("idempotency_key", std::string());
            const std::string id = forum.post_answer(req.matches[1], body["text"].get<std::string>(), key);
            res.status = 201;
            res.set_content(json{{"answer_id", id}}.dump(), "application/json");
        } catch (const Error& e) {
            respond_error(res, e);
        }
    });
    server.Post(prefix + R"(/posts/([^/]+)/answered)", [&forum, respond_error, authorized](
                                                           const httplib::Request& req, httplib::Response& res) {
        if (!authorized(req, res)) return;
        try {
            forum.mark_answered(req.matches[1]);
            res.status = 204;
        } catch (const Error& e) {
            respond_error(res, e);
        }
    });
}

}  // namespace tai
