#include "tai/orchestrator.hpp"

#include <algorithm>
#include <mutex>

#include "tai/codec.hpp"
#include "tai/error.hpp"
#include "tai/prompt.hpp"

namespace tai {

using nlohmann::json;

Orchestrator::Orchestrator(DocumentStore& store, LlmClient& llm, Scheduler& scheduler, Clock clock,
                           OrchestratorOptions options)
    : store_(store), llm_(llm), scheduler_(scheduler), clock_(std::move(clock)), options_(options) {}

void Orchestrator::add_course(CourseConfig course, std::shared_ptr<ForumConnector> forum) {
    validate(course);
    if (!forum) fail(ErrorCode::ConfigError, "course " + course.course_id + " has no forum connector");
    store_.add_secret(course.forum.api_token);
    std::unique_lock lock(courses_mutex_);
    const std::string id = course.course_id;
    courses_[id] = Course{std::move(course), std::move(forum)};
}

std::vector<std::string> Orchestrator::course_ids() const {
    std::shared_lock lock(courses_mutex_);
    std::vector<std::string> ids;
    for (const auto& [id, _] : courses_) ids.push_back(id);
    return ids;
}

bool Orchestrator::has_course(const std::string& course_id) const {
    std::shared_lock lock(courses_mutex_);
    return courses_.count(course_id) > 0;
}

const Orchestrator::Course& Orchestrator::course_for(const std::string& course_id) const {
    std::shared_lock lock(courses_mutex_);
    const auto it = courses_.find(course_id);
    if (it == courses_.end()) fail(ErrorCode::ConfigError, "unknown course " + course_id);
    return it->second;
}

std::optional<WorkItem> Orchestrator::find(const std::string& item_id) const {
    const auto record = store_.get(RecordKind::WorkItem, item_id);
    if (!record) return std::nullopt;
    auto item = record->payload.get<WorkItem>();
    item.version = record->version;
    return item;
}

WorkItem Orchestrator::load(const std::string& item_id) const {
    auto item = find(item_id);
    if (!item) fail(ErrorCode::UnknownItem, "no work item " + item_id);
    return *item;
}

std::vector<WorkItem> Orchestrator::items(const std::optional<std::string>& course_id) const {
    std::vector<WorkItem> out;
    for (const auto& record : store_.scan(RecordKind::WorkItem)) {
        auto item = record.payload.get<WorkItem>();
        item.version = record.version;
        if (course_id && item.post.course_id != *course_id) continue;
        out.push_back(std::move(item));
    }
    return out;
}

std::vector<WorkItem> Orchestrator::review_queue(const std::optional<std::string>& course_id) const {
    auto all = items(course_id);
    std::erase_if(all, [](const WorkItem& i) { return i.state != ItemState::AwaitingReview; });
    std::stable_sort(all.begin(), all.end(), [](const WorkItem& a, const WorkItem& b) {
        if (a.post.created_at != b.post.created_at) return a.post.created_at < b.post.created_at;
        return a.item_id < b.item_id;
    });
    return all;
}

void Orchestrator::commit(const WorkItem& next, std::int64_t expected_version) {
    const auto stored = store_.save(RecordKind::WorkItem, next.item_id, json(next), expected_version);
    if (stored != next.version) {
        fail(ErrorCode::StorageFailure, "version skew on " + next.item_id + ": store " + std::to_string(stored) +
                                            ", item " + std::to_string(next.version));
    }
}

void Orchestrator::record_metric(const WorkItem& item, json payload) {
    payload["course_id"] = item.post.course_id;
    payload["item_id"] = item.item_id;
    payload["at"] = format_rfc3339(clock_());
    const std::string key = item.item_id + "/" + payload.value("event", std::string("event")) + "/" +
                            std::to_string(item.version);
    try {
        store_.save(RecordKind::MetricsEvent, key, std::move(payload), 0);
    } catch (const Error& e) {
        // A duplicate key means a concurrent attempt already recorded this version.
        if (e.code() != ErrorCode::StaleVersion) throw;
    }
}

std::vector<std::string> Orchestrator::poll_cycle(const std::string& course_id) {
    const Course& course = course_for(course_id);
    std::vector<StudentPost> posts;
    try {
        posts = course.forum->fetch_unanswered(Timestamp{});
    } catch (const Error& e) {
        fail(ErrorCode::ForumUnavailable, "poll of " + course_id + " skipped: " + e.what());
    }

    std::vector<std::string> created;
    for (auto& post : posts) {
        if (post.answered || post.course_id != course_id) continue;
        try {
            validate(post);
        } catch (const Error&) {
            continue;
        }
        WorkItem item;
        item.item_id = make_item_id(post.course_id, post.post_id);
        item.post = std::move(post);
        const WorkItem started = transition(item, event::StartGeneration{}, clock_(), options_.policy);
        try {
            commit(started, 0);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::StaleVersion) continue;  // already tracked
            throw;
        }
        created.push_back(started.item_id);
    }
    for (const auto& id : created) {
        scheduler_.submit([this, id] { generate_draft(id); });
    }
    return created;
}

WorkItem Orchestrator::generate_draft(const std::string& item_id) {
    const WorkItem item = load(item_id);
    if (item.state != ItemState::Generating) {
        fail(ErrorCode::IllegalState, "item " + item_id + " is " + std::string(to_string(item.state)));
    }
    const Course& course = course_for(item.post.course_id);

    std::optional<WorkflowEvent> outcome;
    json metric = {{"event", "generation"}, {"attempt", item.attempts}};
    try {
        PromptBundle bundle = prompt::build_base_prompt(course.config, item.post);
        if (const auto options = pending_reprompt(item)) {
            bundle = prompt::apply_reprompt(bundle, *options, item.drafts, course.config.history_window);
        }
        std::string rendered = prompt::render(bundle);
        const Completion completion = llm_.generate(rendered, course.config.model);
        if (completion.text.empty()) fail(ErrorCode::EmptyCompletion, "model returned no text");

        Draft draft;
        draft.prompt_record = PromptRecord{std::move(rendered), std::move(bundle)};
        draft.raw_output = completion.text;
        draft.model_id = completion.model_id;
        draft.token_usage = TokenUsage{completion.input_tokens, completion.output_tokens};
        draft.latency_ms = completion.latency_ms;
        draft.created_at = clock_();
        metric["outcome"] = "ok";
        metric["model_id"] = completion.model_id;
        metric["input_tokens"] = completion.input_tokens;
        metric["output_tokens"] = completion.output_tokens;
        metric["latency_ms"] = completion.latency_ms;
        outcome = event::DraftReady{std::move(draft)};
    } catch (const Error& e) {
        metric["outcome"] = "error";
        metric["error"] = to_string(e.code());
        outcome = event::GenerationFailed{std::string(to_string(e.code())) + ": " + e.what()};
    }

    const WorkItem next = transition(item, *outcome, clock_(), options_.policy);
    try {
        commit(next, item.version);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::StaleVersion) return load(item_id);
        throw;
    }
    record_metric(next, std::move(metric));
    if (next.state == ItemState::Failed && next.attempts < options_.policy.max_generation_attempts) {
        schedule_generation_retry(item_id);
    }
    return next;
}

void Orchestrator::schedule_generation_retry(const std::string& item_id) {
    scheduler_.submit([this, item_id] {
        const WorkItem item = load(item_id);
        if (item.state != ItemState::Failed) return;
        const WorkItem next = transition(item, event::StartGeneration{}, clock_(), options_.policy);
        try {
            commit(next, item.version);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::StaleVersion) return;  // dismissed or retried elsewhere
            throw;
        }
        generate_draft(item_id);
    });
}

WorkItem Orchestrator::handle_review_action(const std::string& item_id, const ReviewAction& action,
                                            std::int64_t expected_version) {
    const WorkItem item = load(item_id);
    WorkflowEvent ev;
    switch (action.kind) {
    case ActionKind::Approve: ev = event::Approve{action.actor_id, action.note}; break;
    case ActionKind::Edit:
        if (!action.edit_payload) fail(ErrorCode::InvalidArgument, "EDIT requires the edited text");
        ev = event::Edit{action.actor_id, action.edit_payload->text, action.note};
        break;
    case ActionKind::Reprompt:
        if (!action.reprompt_payload) fail(ErrorCode::InvalidArgument, "REPROMPT requires options");
        ev = event::Reprompt{action.actor_id, *action.reprompt_payload, action.note};
        break;
    case ActionKind::Dismiss: ev = event::Dismiss{action.actor_id, action.note}; break;
    }

    const WorkItem next = transition(item, ev, expected_version, clock_(), options_.policy);
    commit(next, expected_version);

    if (next.state == ItemState::Approved) {
        scheduler_.submit([this, item_id] { publish(item_id); });
    } else if (next.state == ItemState::Generating) {
        scheduler_.submit([this, item_id] { generate_draft(item_id); });
    }
    return next;
}

WorkItem Orchestrator::publish(const std::string& item_id) {
    const WorkItem item = load(item_id);
    if (item.state != ItemState::Approved) {
        fail(ErrorCode::IllegalState, "item " + item_id + " is " + std::string(to_string(item.state)));
    }
    const Course& course = course_for(item.post.course_id);
    const std::string text = final_text(item);

    std::optional<WorkflowEvent> outcome;
    bool retry = false;
    try {
        outcome = event::PublishSucceeded{course.forum->post_answer(item.post.thread_id, text, item.item_id)};
    } catch (const Error& e) {
        retry = e.code() == ErrorCode::Unreachable;
        outcome = event::PublishFailed{std::string(to_string(e.code())) + ": " + e.what()};
    }

    const WorkItem next = transition(item, *outcome, clock_(), options_.policy);
    try {
        commit(next, item.version);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::StaleVersion) return load(item_id);
        throw;
    }
    record_metric(next, json{{"event", "publish"}, {"outcome", next.state == ItemState::Posted ? "ok" : "error"}});
    if (retry) {
        scheduler_.submit_after(options_.publish_retry_delay, [this, item_id] {
            if (const auto current = find(item_id); current && current->state == ItemState::Approved) {
                publish(item_id);
            }
        });
    }
    return next;
}

std::size_t Orchestrator::resume() {
    std::size_t scheduled = 0;
    for (const auto& item : items()) {
        if (!has_course(item.post.course_id)) continue;
        const std::string id = item.item_id;
        switch (item.state) {
        case ItemState::Generating:
            scheduler_.submit([this, id] { generate_draft(id); });
            ++scheduled;
            break;
        case ItemState::Approved:
            scheduler_.submit([this, id] { publish(id); });
            ++scheduled;
            break;
        case ItemState::Failed:
            if (item.attempts < options_.policy.max_generation_attempts) {
                schedule_generation_retry(id);
                ++scheduled;
            }
            break;
        default: break;
        }
    }
    return scheduled;
}

}  // namespace tai
