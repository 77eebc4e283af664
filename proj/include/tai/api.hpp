#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tai/orchestrator.hpp"

namespace httplib {
class Server;
struct Request;
struct Response;
}  // namespace httplib

namespace tai {

struct ReviewerIdentity {
    std::string actor_id;
    std::string display_name;
    std::string token;  // never serialized
};

struct BindAddress {
    std::string host = "127.0.0.1";
    int port = 8787;
};

// "host:port"; throws ConfigError.
BindAddress parse_bind_address(std::string_view text);

// Reviewer HTTP API.
//
//   GET  /api/queue?course_id=          AWAITING_REVIEW items, oldest first
//   GET  /api/items/{id}                full item (ETag: "<version>")
//   POST /api/items/{id}/approve        200
//   POST /api/items/{id}/edit           {text} -> 200
//   POST /api/items/{id}/reprompt       {preserve_history, code_allowed, detail_level, custom_instructions} -> 202
//   POST /api/items/{id}/dismiss        200
//   POST /api/sync?course_id=           one poll cycle (all courses when omitted)
//   GET  /api/metrics?course_id=        intervention summary
//
// Every request needs "Authorization: Bearer <reviewer token>" (401). Item
// mutations need "If-Match: <version>" (428 when missing); stale versions get
// 409, illegal transitions 422, unknown items 404. Error bodies are
// {"error": <code>, "message": <text>}.
class ApiService {
public:
    ApiService(Orchestrator& orchestrator, std::vector<ReviewerIdentity> reviewers);
    ~ApiService();

    ApiService(const ApiService&) = delete;
    ApiService& operator=(const ApiService&) = delete;

    void mount(httplib::Server& server);

    // Owns a server; listen() blocks until stop().
    bool listen(const BindAddress& address);
    // Binds an ephemeral port and serves on a background thread; returns the port.
    int start_background(const std::string& host = "127.0.0.1");
    void stop();

private:
    const ReviewerIdentity* authenticate(const httplib::Request& req) const;

    Orchestrator& orchestrator_;
    std::vector<ReviewerIdentity> reviewers_;
    std::unique_ptr<httplib::Server> server_;
    std::unique_ptr<std::thread> thread_;
};

}  // namespace tai
