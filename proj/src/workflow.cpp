#include "tai/workflow.hpp"

#include <algorithm>

#include "tai/error.hpp"
#include "tai/text.hpp"

namespace tai {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void illegal(const WorkItem& item, const WorkflowEvent& ev) {
    fail(ErrorCode::IllegalTransition,
         std::string(event_name(ev)) + " is not valid in state " + std::string(to_string(item.state)));
}

void require_actor(const std::string& actor_id) {
    if (actor_id.empty()) fail(ErrorCode::InvalidArgument, "review actions require a human actor_id");
}

ReviewAction make_action(ActionKind kind, const std::string& actor, const WorkItem& item, Timestamp at,
                         const std::optional<std::string>& note) {
    ReviewAction action;
    action.actor_id = actor;
    action.kind = kind;
    action.at = at;
    if (!item.drafts.empty()) action.draft_index = item.drafts.back().index;
    action.note = note;
    return action;
}

}  // namespace

std::string_view event_name(const WorkflowEvent& ev) {
    return std::visit(overloaded{
                          [](const event::StartGeneration&) { return std::string_view("StartGeneration"); },
                          [](const event::DraftReady&) { return std::string_view("DraftReady"); },
                          [](const event::GenerationFailed&) { return std::string_view("GenerationFailed"); },
                          [](const event::Approve&) { return std::string_view("Approve"); },
                          [](const event::Edit&) { return std::string_view("Edit"); },
                          [](const event::Reprompt&) { return std::string_view("Reprompt"); },
                          [](const event::Dismiss&) { return std::string_view("Dismiss"); },
                          [](const event::PublishSucceeded&) { return std::string_view("PublishSucceeded"); },
                          [](const event::PublishFailed&) { return std::string_view("PublishFailed"); },
                      },
                      ev);
}

WorkItem transition(const WorkItem& item, const WorkflowEvent& ev, Timestamp at, const WorkflowPolicy& policy) {
    WorkItem next = item;
    std::optional<std::string> detail;
    const ItemState from = item.state;

    std::visit(
        overloaded{
            [&](const event::StartGeneration&) {
                if (from == ItemState::New) {
                    next.attempts = 1;
                } else if (from == ItemState::Failed) {
                    if (item.attempts >= policy.max_generation_attempts) {
                        fail(ErrorCode::AttemptsExhausted, "item " + item.item_id + " used all " +
                                                               std::to_string(policy.max_generation_attempts) +
                                                               " generation attempts");
                    }
                    next.attempts = item.attempts + 1;
                } else {
                    illegal(item, ev);
                }
                next.state = ItemState::Generating;
            },
            [&](const event::DraftReady& e) {
                if (from != ItemState::Generating) illegal(item, ev);
                if (e.draft.raw_output.empty()) fail(ErrorCode::InvalidArgument, "draft output must not be empty");
                Draft draft = e.draft;
                draft.index = static_cast<int>(item.drafts.size());
                draft.edited_output.reset();
                next.drafts.push_back(std::move(draft));
                next.state = ItemState::AwaitingReview;
            },
            [&](const event::GenerationFailed& e) {
                if (from != ItemState::Generating) illegal(item, ev);
                next.state = ItemState::Failed;
                detail = e.reason;
            },
            [&](const event::Approve& e) {
                if (from != ItemState::AwaitingReview) illegal(item, ev);
                require_actor(e.actor_id);
                next.actions.push_back(make_action(ActionKind::Approve, e.actor_id, item, at, e.note));
                next.state = ItemState::Approved;
            },
            [&](const event::Edit& e) {
                if (from != ItemState::AwaitingReview) illegal(item, ev);
                require_actor(e.actor_id);
                if (text::trim(e.text).empty()) fail(ErrorCode::InvalidArgument, "edited text must not be blank");
                Draft& latest = next.drafts.back();
                ReviewAction action = make_action(ActionKind::Edit, e.actor_id, item, at, e.note);
                action.edit_payload = EditPayload{e.text, compute_edit_distance(latest.raw_output, e.text)};
                latest.edited_output = e.text;
                next.actions.push_back(std::move(action));
            },
            [&](const event::Reprompt& e) {
                if (from != ItemState::AwaitingReview) illegal(item, ev);
                require_actor(e.actor_id);
                validate(e.options);
                ReviewAction action = make_action(ActionKind::Reprompt, e.actor_id, item, at, e.note);
                action.reprompt_payload = e.options;
                next.actions.push_back(std::move(action));
                next.state = ItemState::Generating;
                next.attempts = 1;
            },
            [&](const event::Dismiss& e) {
                if (from != ItemState::AwaitingReview && from != ItemState::Failed) illegal(item, ev);
                require_actor(e.actor_id);
                next.actions.push_back(make_action(ActionKind::Dismiss, e.actor_id, item, at, e.note));
                next.state = ItemState::Dismissed;
            },
            [&](const event::PublishSucceeded& e) {
                if (from != ItemState::Approved) illegal(item, ev);
                next.state = ItemState::Posted;
                detail = e.answer_id;
            },
            [&](const event::PublishFailed& e) {
                if (from != ItemState::Approved) illegal(item, ev);
                detail = e.reason;
            },
        },
        ev);

    next.transitions.push_back(TransitionRecord{std::string(event_name(ev)), from, next.state, at, detail});
    next.version = item.version + 1;
    return next;
}

WorkItem transition(const WorkItem& item, const WorkflowEvent& ev, std::int64_t expected_version, Timestamp at,
                    const WorkflowPolicy& policy) {
    if (expected_version != item.version) {
        fail(ErrorCode::StaleVersion, "item " + item.item_id + " is at version " + std::to_string(item.version) +
                                          ", caller expected " + std::to_string(expected_version));
    }
    return transition(item, ev, at, policy);
}

std::string final_text(const WorkItem& item) {
    if (item.state != ItemState::Approved && item.state != ItemState::Posted) {
        fail(ErrorCode::NotApproved,
             "item " + item.item_id + " is " + std::string(to_string(item.state)) + ", not approved");
    }
    if (item.drafts.empty()) fail(ErrorCode::IllegalState, "approved item " + item.item_id + " has no drafts");
    return item.drafts.back().published_text();
}

std::optional<RepromptOptions> pending_reprompt(const WorkItem& item) {
    if (item.actions.empty() || item.actions.back().kind != ActionKind::Reprompt) return std::nullopt;
    return item.actions.back().reprompt_payload;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    const auto s = text::decode_utf8(a);
    const auto t = text::decode_utf8(b);
    std::vector<std::size_t> prev(t.size() + 1), cur(t.size() + 1);
    for (std::size_t j = 0; j <= t.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= s.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= t.size(); ++j) {
            const std::size_t substitution = prev[j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, substitution});
        }
        std::swap(prev, cur);
    }
    return prev[t.size()];
}

double compute_edit_distance(std::string_view original, std::string_view edited) {
    const std::size_t longest = std::max(text::decode_utf8(original).size(), text::decode_utf8(edited).size());
    if (longest == 0) return 0.0;
    return static_cast<double>(levenshtein(original, edited)) / static_cast<double>(longest);
}

}  // namespace tai
