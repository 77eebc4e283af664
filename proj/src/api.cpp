#include "tai/api.hpp"

#include <charconv>

#include <httplib.h>

#include "tai/analytics.hpp"
#include "tai/codec.hpp"
#include "tai/error.hpp"
#include "tai/text.hpp"

namespace tai {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
    send_json(res, status, json{{"error", code}, {"message", message}});
}

int status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::StaleVersion: return 409;
    case ErrorCode::IllegalTransition:
    case ErrorCode::AttemptsExhausted:
    case ErrorCode::IllegalState: return 422;
    case ErrorCode::UnknownItem:
    case ErrorCode::ConfigError: return 404;
    case ErrorCode::InvalidArgument: return 400;
    case ErrorCode::ForumUnavailable: return 503;
    default: return 500;
    }
}

void send_item(httplib::Response& res, int status, const WorkItem& item) {
    res.set_header("ETag", "\"" + std::to_string(item.version) + "\"");
    send_json(res, status, json(item));
}

std::optional<std::string> course_param(const httplib::Request& req) {
    if (!req.has_param("course_id")) return std::nullopt;
    auto value = req.get_param_value("course_id");
    if (value.empty()) return std::nullopt;
    return value;
}

std::optional<std::int64_t> parse_if_match(std::string_view raw) {
    std::string_view v = text::trim(raw);
    if (v.substr(0, 2) == "W/") v.remove_prefix(2);
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    std::int64_t version = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), version);
    if (ec != std::errc() || ptr != v.data() + v.size() || version < 0) return std::nullopt;
    return version;
}

json queue_entry(const WorkItem& item) {
    const Draft* draft = item.latest_draft();
    std::string preview = draft ? draft->published_text() : std::string();
    preview = std::string(text::prefix_code_points(preview, 160));
    return {{"item_id", item.item_id},
            {"course_id", item.post.course_id},
            {"post_id", item.post.post_id},
            {"title", item.post.title},
            {"waiting_since", format_rfc3339(draft ? draft->created_at : item.post.created_at)},
            {"posted_at", format_rfc3339(item.post.created_at)},
            {"draft_index", draft ? json(draft->index) : json(nullptr)},
            {"draft_preview", preview},
            {"version", item.version}};
}

json parse_body(const httplib::Request& req) {
    if (text::trim(req.body).empty()) return json::object();
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) fail(ErrorCode::InvalidArgument, "request body must be a JSON object");
    return body;
}

std::optional<std::string> optional_string(const json& body, const char* key) {
    const auto it = body.find(key);
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) fail(ErrorCode::InvalidArgument, std::string(key) + " must be a string");
    return it->get<std::string>();
}

}  // namespace

BindAddress parse_bind_address(std::string_view text) {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
        fail(ErrorCode::ConfigError, "bind address must be host:port, got " + std::string(text));
    }
    BindAddress out;
    out.host = std::string(text.substr(0, colon));
    const auto port = text.substr(colon + 1);
    const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), out.port);
    if (ec != std::errc() || ptr != port.data() + port.size() || out.port < 0 || out.port > 65535) {
        fail(ErrorCode::ConfigError, "bad port in bind address " + std::string(text));
    }
    return out;
}

ApiService::ApiService(Orchestrator& orchestrator, std::vector<ReviewerIdentity> reviewers)
    : orchestrator_(orchestrator), reviewers_(std::move(reviewers)) {}

ApiService::~ApiService() { stop(); }

const ReviewerIdentity* ApiService::authenticate(const httplib::Request& req) const {
    const std::string header = req.get_header_value("Authorization");
    constexpr std::string_view scheme = "Bearer ";
    if (header.size() <= scheme.size() || std::string_view(header).substr(0, scheme.size()) != scheme) return nullptr;
    const std::string_view token = std::string_view(header).substr(scheme.size());
    for (const auto& r : reviewers_) {
        if (!r.token.empty() && r.token == token) return &r;
    }
    return nullptr;
}

void ApiService::mount(httplib::Server& server) {
    using Handler = std::function<void(const httplib::Request&, httplib::Response&, const ReviewerIdentity&)>;
    auto guarded = [this](Handler handler) {
        return [this, handler](const httplib::Request& req, httplib::Response& res) {
            const ReviewerIdentity* who = authenticate(req);
            if (!who) {
                send_error(res, 401, "Unauthorized", "missing or invalid bearer token");
                return;
            }
            try {
                handler(req, res, *who);
            } catch (const Error& e) {
                send_error(res, status_for(e.code()), to_string(e.code()), e.what());
            } catch (const json::exception& e) {
                send_error(res, 400, "InvalidArgument", e.what());
            }
        };
    };

    // Review mutation: If-Match, then one ReviewAction through the orchestrator.
    auto review = [this, guarded](ActionKind kind, int success_status) {
        return guarded([this, kind, success_status](const httplib::Request& req, httplib::Response& res,
                                                    const ReviewerIdentity& who) {
            if (!req.has_header("If-Match")) {
                send_error(res, 428, "PreconditionRequired", "If-Match: <version> is required");
                return;
            }
            const auto expected = parse_if_match(req.get_header_value("If-Match"));
            if (!expected) {
                send_error(res, 400, "InvalidArgument", "If-Match must hold an item version");
                return;
            }
            const json body = parse_body(req);
            ReviewAction action;
            action.actor_id = who.actor_id;
            action.kind = kind;
            action.note = optional_string(body, "note");
            if (kind == ActionKind::Edit) {
                const auto text = optional_string(body, "text");
                if (!text) fail(ErrorCode::InvalidArgument, "edit requires \"text\"");
                action.edit_payload = EditPayload{*text, 0.0};
            } else if (kind == ActionKind::Reprompt) {
                RepromptOptions options;
                try {
                    options = body.get<RepromptOptions>();
                } catch (const json::exception& e) {
                    fail(ErrorCode::InvalidArgument, std::string("bad reprompt options: ") + e.what());
                }
                action.reprompt_payload = options;
            }
            send_item(res, success_status,
                      orchestrator_.handle_review_action(req.matches[1], action, *expected));
        });
    };

    server.Get(R"(/api/queue)", guarded([this](const httplib::Request& req, httplib::Response& res,
                                               const ReviewerIdentity&) {
                   const auto course = course_param(req);
                   if (course && !orchestrator_.has_course(*course)) {
                       fail(ErrorCode::ConfigError, "unknown course " + *course);
                   }
                   json items = json::array();
                   for (const auto& item : orchestrator_.review_queue(course)) items.push_back(queue_entry(item));
                   send_json(res, 200, json{{"items", items}});
               }));

    server.Get(R"(/api/items/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res,
                                                       const ReviewerIdentity&) {
                   send_item(res, 200, orchestrator_.load(req.matches[1]));
               }));

    server.Post(R"(/api/items/([^/]+)/approve)", review(ActionKind::Approve, 200));
    server.Post(R"(/api/items/([^/]+)/edit)", review(ActionKind::Edit, 200));
    server.Post(R"(/api/items/([^/]+)/reprompt)", review(ActionKind::Reprompt, 202));
    server.Post(R"(/api/items/([^/]+)/dismiss)", review(ActionKind::Dismiss, 200));

    server.Post(R"(/api/sync)", guarded([this](const httplib::Request& req, httplib::Response& res,
                                               const ReviewerIdentity&) {
                    std::vector<std::string> courses;
                    if (const auto course = course_param(req)) {
                        if (!orchestrator_.has_course(*course)) fail(ErrorCode::ConfigError, "unknown course " + *course);
                        courses.push_back(*course);
                    } else {
                        courses = orchestrator_.course_ids();
                    }
                    json created = json::array();
                    for (const auto& c : courses) {
                        for (const auto& id : orchestrator_.poll_cycle(c)) created.push_back(id);
                    }
                    send_json(res, 200, json{{"created", created}});
                }));

    server.Get(R"(/api/metrics)", guarded([this](const httplib::Request& req, httplib::Response& res,
                                                 const ReviewerIdentity&) {
                   const auto course = course_param(req);
                   if (course && !orchestrator_.has_course(*course)) {
                       fail(ErrorCode::ConfigError, "unknown course " + *course);
                   }
                   send_json(res, 200, analytics::to_json(analytics::intervention_summary(orchestrator_.store(), course)));
               }));

    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Headers", "Authorization, If-Match, Content-Type");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Expose-Headers", "ETag");
    });
}

bool ApiService::listen(const BindAddress& address) {
    server_ = std::make_unique<httplib::Server>();
    mount(*server_);
    return server_->listen(address.host, address.port);
}

int ApiService::start_background(const std::string& host) {
    server_ = std::make_unique<httplib::Server>();
    mount(*server_);
    const int port = server_->bind_to_any_port(host);
    if (port < 0) fail(ErrorCode::ConfigError, "cannot bind " + host);
    thread_ = std::make_unique<std::thread>([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port;
}

void ApiService::stop() {
    if (server_) server_->stop();
    if (thread_ && thread_->joinable()) thread_->join();
    thread_.reset();
}

}  // namespace tai
