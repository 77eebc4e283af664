#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "tai/course.hpp"
#include "tai/domain.hpp"
#include "tai/forum.hpp"
#include "tai/llm.hpp"
#include "tai/scheduler.hpp"
#include "tai/store.hpp"
#include "tai/workflow.hpp"

namespace tai {

struct OrchestratorOptions {
    WorkflowPolicy policy;
    std::chrono::milliseconds publish_retry_delay{5000};
};

// Drives work items from discovery to publication. All item state lives in
// the store; every change is a workflow transition committed with
// compare-and-swap on the item version, so concurrent callers are safe.
class Orchestrator {
public:
    Orchestrator(DocumentStore& store, LlmClient& llm, Scheduler& scheduler, Clock clock = system_now,
                 OrchestratorOptions options = {});

    void add_course(CourseConfig course, std::shared_ptr<ForumConnector> forum);
    std::vector<std::string> course_ids() const;
    bool has_course(const std::string& course_id) const;

    // Creates a GENERATING item for every unanswered post not yet tracked and
    // schedules its first generation. Returns the new item ids. Throws
    // ForumUnavailable (nothing created) when the forum cannot be read.
    std::vector<std::string> poll_cycle(const std::string& course_id);

    // Builds the prompt, calls the model and records the draft. Provider
    // failures move the item to FAILED (and schedule a retry while attempts
    // remain) instead of throwing. Throws IllegalState unless GENERATING.
    WorkItem generate_draft(const std::string& item_id);

    // Applies a human review action. Throws UnknownItem, StaleVersion,
    // IllegalTransition or InvalidArgument.
    WorkItem handle_review_action(const std::string& item_id, const ReviewAction& action,
                                  std::int64_t expected_version);

    // Posts final_text with idempotency key = item id. Transport failures
    // leave the item APPROVED and schedule another attempt.
    WorkItem publish(const std::string& item_id);

    // Reschedules unfinished work after a restart; returns tasks scheduled.
    std::size_t resume();

    std::optional<WorkItem> find(const std::string& item_id) const;
    WorkItem load(const std::string& item_id) const;
    std::vector<WorkItem> items(const std::optional<std::string>& course_id = std::nullopt) const;
    // AWAITING_REVIEW items, oldest post first.
    std::vector<WorkItem> review_queue(const std::optional<std::string>& course_id = std::nullopt) const;

    DocumentStore& store() { return store_; }
    const WorkflowPolicy& policy() const { return options_.policy; }

private:
    struct Course {
        CourseConfig config;
        std::shared_ptr<ForumConnector> forum;
    };

    const Course& course_for(const std::string& course_id) const;
    void commit(const WorkItem& next, std::int64_t expected_version);
    void record_metric(const WorkItem& item, nlohmann::json payload);
    void schedule_generation_retry(const std::string& item_id);

    DocumentStore& store_;
    LlmClient& llm_;
    Scheduler& scheduler_;
    Clock clock_;
    OrchestratorOptions options_;
    mutable std::shared_mutex courses_mutex_;
    std::map<std::string, Course> courses_;
};

}  // namespace tai
