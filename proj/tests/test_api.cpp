#include <doctest.h>

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "support/fixtures.hpp"
#include "tai/api.hpp"
#include "tai/prompt.hpp"

using namespace tai;
using nlohmann::json;
using testing::make_post;
using testing::Rig;

namespace {

struct ApiRig {
    Rig rig;
    ApiService api;
    int port;
    httplib::Client client;

    explicit ApiRig(std::vector<StudentPost> posts)
        : rig(std::move(posts)),
          api(rig.orch, {{"ta-1", "Alex", "tok-1"}, {"ta-2", "Sam", "tok-2"}}),
          port(api.start_background()),
          client("127.0.0.1", port) {
        client.set_bearer_token_auth("tok-1");
        rig.orch.poll_cycle("CS180");
        rig.scheduler.drain();
    }
    ~ApiRig() { api.stop(); }

    httplib::Result post(const std::string& path, const json& body, std::optional<std::int64_t> version) {
        httplib::Headers h;
        if (version) h.emplace("If-Match", "\"" + std::to_string(*version) + "\"");
        return client.Post(path, h, body.dump(), "application/json");
    }

    std::string first_id() { return rig.orch.review_queue().at(0).item_id; }
};

}  // namespace

TEST_CASE("queue and item reads") {
    ApiRig a({make_post(2), make_post(1)});
    auto res = a.client.Get("/api/queue");
    REQUIRE(res);
    CHECK(res->status == 200);
    const json q = json::parse(res->body);
    REQUIRE(q["items"].size() == 2);
    CHECK(q["items"][0]["post_id"] == "p1");
    CHECK(q["items"][0]["title"] == "Question 1");

    const std::string id = a.first_id();
    const auto before = a.rig.store.scan();
    res = a.client.Get("/api/items/" + id);
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("ETag") == "\"" + std::to_string(a.rig.orch.load(id).version) + "\"");
    CHECK(json::parse(res->body)["state"] == "AWAITING_REVIEW");
    a.client.Get("/api/metrics");
    CHECK(a.rig.store.scan() == before);

    res = a.client.Get("/api/items/itm-unknown");
    REQUIRE(res);
    CHECK(res->status == 404);
    res = a.client.Get("/api/queue?course_id=NOPE");
    REQUIRE(res);
    CHECK(res->status == 404);
}

TEST_CASE("authentication is required") {
    ApiRig a({make_post(1)});
    httplib::Client anon("127.0.0.1", a.port);
    auto res = anon.Get("/api/queue");
    REQUIRE(res);
    CHECK(res->status == 401);
    anon.set_bearer_token_auth("wrong");
    res = anon.Get("/api/queue");
    REQUIRE(res);
    CHECK(res->status == 401);
}

TEST_CASE("approve with the current version posts; a stale version conflicts") {
    ApiRig a({make_post(1)});
    const std::string id = a.first_id();
    const auto v = a.rig.orch.load(id).version;

    auto res = a.post("/api/items/" + id + "/approve", json::object(), std::nullopt);
    REQUIRE(res);
    CHECK(res->status == 428);
    res = a.client.Post("/api/items/" + id + "/approve", {{"If-Match", "abc"}}, "", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);

    res = a.post("/api/items/" + id + "/approve", json::object(), v);
    REQUIRE(res);
    CHECK(res->status == 200);
    const json body = json::parse(res->body);
    CHECK(body["state"] == "APPROVED");
    CHECK(body["actions"].back()["actor_id"] == "ta-1");

    res = a.post("/api/items/" + id + "/approve", json::object(), v);
    REQUIRE(res);
    CHECK(res->status == 409);

    a.rig.scheduler.drain();
    CHECK(a.rig.orch.load(id).state == ItemState::Posted);
    res = a.post("/api/items/" + id + "/dismiss", json::object(), a.rig.orch.load(id).version);
    REQUIRE(res);
    CHECK(res->status == 422);

    res = a.post("/api/items/itm-missing/approve", json::object(), 1);
    REQUIRE(res);
    CHECK(res->status == 404);
}

TEST_CASE("edit and reprompt through the API") {
    ApiRig a({make_post(1)});
    const std::string id = a.first_id();
    auto v = a.rig.orch.load(id).version;

    auto res = a.post("/api/items/" + id + "/edit", json::object(), v);
    REQUIRE(res);
    CHECK(res->status == 400);

    res = a.post("/api/items/" + id + "/edit", {{"text", "Try a smaller input first."}}, v);
    REQUIRE(res);
    CHECK(res->status == 200);
    v = json::parse(res->body)["version"].get<std::int64_t>();

    res = a.post("/api/items/" + id + "/reprompt",
                 {{"preserve_history", true}, {"code_allowed", false}, {"detail_level", "DETAILED"},
                  {"custom_instructions", nullptr}},
                 v);
    REQUIRE(res);
    CHECK(res->status == 202);
    CHECK(json::parse(res->body)["state"] == "GENERATING");
    a.rig.scheduler.drain();

    const WorkItem item = a.rig.orch.load(id);
    REQUIRE(item.drafts.size() == 2);
    const std::string& text = item.drafts[1].prompt_record.text;
    CHECK(text.find(prompt::kCodeForbidden) != std::string::npos);
    CHECK(text.find(prompt::kDetailDetailed) != std::string::npos);

    res = a.post("/api/items/" + item.item_id + "/reprompt", {{"detail_level", "VERBOSE"}}, item.version);
    REQUIRE(res);
    CHECK(res->status == 400);
}

TEST_CASE("sync and metrics endpoints") {
    ApiRig a({make_post(1)});
    a.rig.forum->add_post(make_post(2));
    auto res = a.client.Post("/api/sync?course_id=CS180");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["created"].size() == 1);

    a.rig.forum->fail_fetches(1);
    res = a.client.Post("/api/sync");
    REQUIRE(res);
    CHECK(res->status == 503);

    res = a.client.Get("/api/metrics?course_id=CS180");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["items_total"] == 2);
}

TEST_CASE("preflight requests carry CORS headers") {
    ApiRig a({});
    auto res = a.client.Options("/api/queue");
    REQUIRE(res);
    CHECK(res->status == 204);
    CHECK(res->has_header("Access-Control-Allow-Origin"));
}

TEST_CASE("bind address parsing") {
    CHECK(parse_bind_address("0.0.0.0:9000").port == 9000);
    CHECK(parse_bind_address("0.0.0.0:9000").host == "0.0.0.0");
    CHECK_THROWS_AS(parse_bind_address("nocolon"), tai::Error);
    CHECK_THROWS_AS(parse_bind_address("h:99999"), tai::Error);
}
