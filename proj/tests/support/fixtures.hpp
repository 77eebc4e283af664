#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tai/forum.hpp"
#include "tai/llm.hpp"
#include "tai/orchestrator.hpp"
#include "tai/scheduler.hpp"
#include "tai/store.hpp"

namespace testing {

inline tai::StudentPost make_post(int i, const std::string& course = "CS180") {
    tai::StudentPost p;
    p.post_id = "p" + std::to_string(i);
    p.thread_id = "t" + std::to_string(i);
    p.course_id = course;
    p.title = "Question " + std::to_string(i);
    p.body = "How do I approach problem " + std::to_string(i) + "?";
    p.author_label = "anon";
    p.created_at = tai::parse_rfc3339("2024-02-01T08:00:00Z") + std::chrono::minutes(i);
    return p;
}

inline tai::ReviewAction action(tai::ActionKind kind, std::string actor = "ta-1") {
    tai::ReviewAction a;
    a.actor_id = std::move(actor);
    a.kind = kind;
    return a;
}

// Memory store, mock model, inline scheduler and a fixture forum for one course.
struct Rig {
    tai::DocumentStore store;
    tai::MockLlm llm;
    tai::InlineScheduler scheduler;
    std::shared_ptr<tai::FileForum> forum;
    tai::Timestamp now = tai::parse_rfc3339("2024-02-02T00:00:00Z");
    tai::Orchestrator orch;

    explicit Rig(std::vector<tai::StudentPost> posts, tai::OrchestratorOptions options = {})
        : forum(std::make_shared<tai::FileForum>(tai::ForumCredentials{"file://", "tok", "CS180"}, std::move(posts))),
          orch(store, llm, scheduler, [this] { return now; }, options) {
        tai::CourseConfig c;
        c.course_id = "CS180";
        c.documents = {{"syllabus", "Late work loses 10% per day."}};
        orch.add_course(c, forum);
    }
};

}  // namespace testing
