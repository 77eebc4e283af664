#include "tai/replay.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "tai/codec.hpp"
#include "tai/error.hpp"
#include "tai/orchestrator.hpp"
#include "tai/scheduler.hpp"
#include "tai/store.hpp"

namespace tai {

using nlohmann::json;

namespace {

ActionKind parse_action(const std::string& name) {
    if (name == "approve") return ActionKind::Approve;
    if (name == "edit") return ActionKind::Edit;
    if (name == "reprompt") return ActionKind::Reprompt;
    if (name == "dismiss") return ActionKind::Dismiss;
    fail(ErrorCode::ParseError, "unknown script action \"" + name + "\"");
}

std::vector<CourseConfig> load_courses(const std::filesystem::path& dir, const std::vector<StudentPost>& posts) {
    std::map<std::string, CourseConfig> courses;
    const auto path = dir / "courses.json";
    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        const json doc = json::parse(in, nullptr, false);
        if (doc.is_discarded() || !doc.is_array()) fail(ErrorCode::ConfigError, path.string() + " must be an array");
        for (const auto& c : doc) {
            CourseConfig cc;
            cc.course_id = c.at("course_id").get<std::string>();
            cc.display_name = c.value("display_name", std::string());
            cc.token_budget = c.value("token_budget", cc.token_budget);
            cc.history_window = c.value("history_window", cc.history_window);
            cc.model.model_id = c.value("model_id", std::string("mock-llm"));
            for (const auto& d : c.value("documents", json::array())) {
                cc.documents.push_back({d.at("doc_id").get<std::string>(), d.at("text").get<std::string>()});
            }
            courses[cc.course_id] = std::move(cc);
        }
    }
    for (const auto& p : posts) {
        if (courses.count(p.course_id)) continue;
        CourseConfig cc;
        cc.course_id = p.course_id;
        cc.model.model_id = "mock-llm";
        courses[p.course_id] = std::move(cc);
    }
    std::vector<CourseConfig> out;
    for (auto& [id, cc] : courses) {
        cc.forum = ForumCredentials{"file://" + dir.string(), "replay-token", id};
        out.push_back(std::move(cc));
    }
    return out;
}

}  // namespace

std::vector<ReplayStep> parse_review_script(const json& doc) {
    if (!doc.is_array()) fail(ErrorCode::ParseError, "review script must be an array");
    std::vector<ReplayStep> steps;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& entry = doc[i];
        try {
            ReplayStep step;
            step.post_id = entry.at("post_id").get<std::string>();
            step.action = parse_action(entry.at("action").get<std::string>());
            step.payload = entry.value("payload", json::object());
            step.actor = entry.value("actor", step.actor);
            if (entry.contains("course_id")) step.course_id = entry.at("course_id").get<std::string>();
            if (entry.contains("note")) step.note = entry.at("note").get<std::string>();
            if (step.action == ActionKind::Edit && !step.payload.contains("text")) {
                fail(ErrorCode::ParseError, "edit needs payload.text");
            }
            steps.push_back(std::move(step));
        } catch (const json::exception& e) {
            fail(ErrorCode::ParseError, "script entry " + std::to_string(i) + ": " + e.what());
        } catch (const Error& e) {
            fail(ErrorCode::ParseError, "script entry " + std::to_string(i) + ": " + e.what());
        }
    }
    return steps;
}

std::vector<ReplayStep> load_review_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseError, "cannot open review script " + path.string());
    const json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) fail(ErrorCode::ParseError, path.string() + " is not valid JSON");
    return parse_review_script(doc);
}

ReplayResult run_replay(const std::filesystem::path& fixture_dir, const std::vector<ReplayStep>& steps) {
    const auto posts = load_forum_fixture(fixture_dir / "posts.json");
    Timestamp newest{};
    for (const auto& p : posts) newest = std::max(newest, p.created_at);
    auto tick = std::make_shared<Timestamp>(newest + std::chrono::minutes(1));
    Clock clock = [tick] {
        const Timestamp now = *tick;
        *tick += std::chrono::seconds(1);
        return now;
    };

    DocumentStore store;
    MockLlm llm;
    InlineScheduler scheduler;
    Orchestrator orchestrator(store, llm, scheduler, clock);
    std::map<std::string, std::shared_ptr<FileForum>> forums;
    for (auto& course : load_courses(fixture_dir, posts)) {
        std::vector<StudentPost> course_posts;
        std::copy_if(posts.begin(), posts.end(), std::back_inserter(course_posts),
                     [&](const StudentPost& p) { return p.course_id == course.course_id; });
        auto forum = std::make_shared<FileForum>(course.forum, course_posts, std::nullopt, clock);
        forums[course.course_id] = forum;
        orchestrator.add_course(std::move(course), forum);
    }

    for (const auto& id : orchestrator.course_ids()) orchestrator.poll_cycle(id);
    scheduler.drain();

    for (const auto& step : steps) {
        std::string course_id;
        if (step.course_id) {
            course_id = *step.course_id;
        } else {
            std::set<std::string> owners;
            for (const auto& p : posts) {
                if (p.post_id == step.post_id) owners.insert(p.course_id);
            }
            if (owners.size() != 1) {
                fail(ErrorCode::InvalidArgument, "script post_id " + step.post_id + " matches " +
                                                     std::to_string(owners.size()) + " courses; set course_id");
            }
            course_id = *owners.begin();
        }
        const WorkItem item = orchestrator.load(make_item_id(course_id, step.post_id));

        ReviewAction action;
        action.actor_id = step.actor;
        action.kind = step.action;
        action.note = step.note;
        if (step.action == ActionKind::Edit) {
            action.edit_payload = EditPayload{step.payload.at("text").get<std::string>(), 0.0};
        } else if (step.action == ActionKind::Reprompt) {
            action.reprompt_payload = step.payload.get<RepromptOptions>();
        }
        orchestrator.handle_review_action(item.item_id, action, item.version);
        scheduler.drain();
    }

    ReplayResult result;
    result.items = orchestrator.items();
    for (const auto& [_, forum] : forums) {
        const auto answers = forum->answers();
        result.answers.insert(result.answers.end(), answers.begin(), answers.end());
    }
    result.summary = analytics::intervention_summary(result.items);
    result.report = analytics::format_summary(result.summary) +
                    "forum_answers=" + std::to_string(result.answers.size()) + "\n";
    return result;
}

}  // namespace tai
