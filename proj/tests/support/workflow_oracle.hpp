#pragma once

// Test-only reference model of the review workflow, written directly from the
// transition table and independent of tai::transition.

#include <array>
#include <optional>
#include <string>

#include "tai/workflow.hpp"

namespace tai::testing {

enum class Ev { Start, DraftReady, GenFailed, Approve, Edit, Reprompt, Dismiss, PubOk, PubFail };
inline constexpr std::array<Ev, 9> kAllEvents = {Ev::Start,    Ev::DraftReady, Ev::GenFailed, Ev::Approve, Ev::Edit,
                                                  Ev::Reprompt, Ev::Dismiss,    Ev::PubOk,     Ev::PubFail};

struct OracleState {
    ItemState state = ItemState::New;
    int attempts = 0;
    bool operator==(const OracleState&) const = default;
};

inline std::optional<OracleState> oracle_step(OracleState s, Ev e, int max_attempts = 3) {
    using S = ItemState;
    switch (s.state) {
    case S::New:
        if (e == Ev::Start) return OracleState{S::Generating, 1};
        break;
    case S::Generating:
        if (e == Ev::DraftReady) return OracleState{S::AwaitingReview, s.attempts};
        if (e == Ev::GenFailed) return OracleState{S::Failed, s.attempts};
        break;
    case S::Failed:
        if (e == Ev::Start && s.attempts < max_attempts) return OracleState{S::Generating, s.attempts + 1};
        if (e == Ev::Dismiss) return OracleState{S::Dismissed, s.attempts};
        break;
    case S::AwaitingReview:
        if (e == Ev::Approve) return OracleState{S::Approved, s.attempts};
        if (e == Ev::Edit) return OracleState{S::AwaitingReview, s.attempts};
        if (e == Ev::Reprompt) return OracleState{S::Generating, 1};
        if (e == Ev::Dismiss) return OracleState{S::Dismissed, s.attempts};
        break;
    case S::Approved:
        if (e == Ev::PubOk) return OracleState{S::Posted, s.attempts};
        if (e == Ev::PubFail) return OracleState{S::Approved, s.attempts};
        break;
    case S::Posted:
    case S::Dismissed: break;
    }
    return std::nullopt;
}

inline WorkflowEvent make_event(Ev e, int serial = 0) {
    switch (e) {
    case Ev::Start: return event::StartGeneration{};
    case Ev::DraftReady: {
        Draft d;
        d.raw_output = "draft text " + std::to_string(serial);
        d.model_id = "mock";
        return event::DraftReady{d};
    }
    case Ev::GenFailed: return event::GenerationFailed{"provider down"};
    case Ev::Approve: return event::Approve{"ta-approver", std::nullopt};
    case Ev::Edit: return event::Edit{"ta-editor", "edited text " + std::to_string(serial), std::nullopt};
    case Ev::Reprompt: {
        RepromptOptions o;
        o.preserve_history = serial % 2 == 0;
        o.code_allowed = serial % 3 != 0;
        return event::Reprompt{"ta-reprompter", o, std::nullopt};
    }
    case Ev::Dismiss: return event::Dismiss{"ta-dismisser", std::nullopt};
    case Ev::PubOk: return event::PublishSucceeded{"ans-1"};
    case Ev::PubFail: return event::PublishFailed{"Unreachable"};
    }
    return event::StartGeneration{};
}

inline WorkItem fresh_item() {
    WorkItem item;
    item.item_id = "itm-test";
    item.post.post_id = "p1";
    item.post.thread_id = "t1";
    item.post.course_id = "CS180";
    item.post.title = "Segfault";
    item.post.body = "What is a segfault?";
    return item;
}

}  // namespace tai::testing
