#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "tai/domain.hpp"

namespace tai {

// Review workflow. transition() is pure: it either returns the successor item
// (version + 1) or throws, leaving the input untouched.
//
//   NEW             --StartGeneration-->  GENERATING
//   GENERATING      --DraftReady-->       AWAITING_REVIEW
//   GENERATING      --GenerationFailed--> FAILED
//   FAILED          --StartGeneration-->  GENERATING       (attempts < max)
//   FAILED          --Dismiss-->          DISMISSED
//   AWAITING_REVIEW --Approve-->          APPROVED
//   AWAITING_REVIEW --Edit-->             AWAITING_REVIEW  (edits latest draft in place)
//   AWAITING_REVIEW --Reprompt-->         GENERATING       (attempts reset to 1)
//   AWAITING_REVIEW --Dismiss-->          DISMISSED
//   APPROVED        --PublishSucceeded--> POSTED
//   APPROVED        --PublishFailed-->    APPROVED
namespace event {

struct StartGeneration {};

struct DraftReady {
    Draft draft;
};

struct GenerationFailed {
    std::string reason;
};

struct Approve {
    std::string actor_id;
    std::optional<std::string> note;
};

struct Edit {
    std::string actor_id;
    std::string text;
    std::optional<std::string> note;
};

struct Reprompt {
    std::string actor_id;
    RepromptOptions options;
    std::optional<std::string> note;
};

struct Dismiss {
    std::string actor_id;
    std::optional<std::string> note;
};

struct PublishSucceeded {
    std::string answer_id;
};

struct PublishFailed {
    std::string reason;
};

}  // namespace event

using WorkflowEvent =
    std::variant<event::StartGeneration, event::DraftReady, event::GenerationFailed, event::Approve, event::Edit,
                 event::Reprompt, event::Dismiss, event::PublishSucceeded, event::PublishFailed>;

std::string_view event_name(const WorkflowEvent& ev);

struct WorkflowPolicy {
    int max_generation_attempts = 3;
};

WorkItem transition(const WorkItem& item, const WorkflowEvent& ev, Timestamp at, const WorkflowPolicy& policy = {});

// As above, but first rejects with StaleVersion when expected_version differs
// from item.version.
WorkItem transition(const WorkItem& item, const WorkflowEvent& ev, std::int64_t expected_version, Timestamp at,
                    const WorkflowPolicy& policy = {});

// Text to publish: the latest draft's edit if any, else its raw output.
// Throws NotApproved unless the item is APPROVED or POSTED.
std::string final_text(const WorkItem& item);

// Options of the REPROMPT that opened the current generation round, if any.
std::optional<RepromptOptions> pending_reprompt(const WorkItem& item);

// Levenshtein distance over Unicode code points divided by the longer length;
// 0 when both are empty.
double compute_edit_distance(std::string_view original, std::string_view edited);

std::size_t levenshtein(std::string_view a, std::string_view b);

}  // namespace tai
