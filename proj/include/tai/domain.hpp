#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tai/time.hpp"

namespace tai {

struct StudentPost {
    std::string post_id;
    std::string thread_id;
    std::string course_id;
    std::string title;
    std::string body;
    std::string author_label;
    Timestamp created_at{};
    std::optional<std::string> category;
    bool answered = false;

    bool operator==(const StudentPost&) const = default;
};

enum class DetailLevel { Concise, Standard, Detailed };

struct RepromptOptions {
    bool preserve_history = false;
    bool code_allowed = true;
    DetailLevel detail_level = DetailLevel::Standard;
    std::optional<std::string> custom_instructions;

    bool operator==(const RepromptOptions&) const = default;
};

// Throws InvalidArgument when custom_instructions is present but blank.
void validate(const RepromptOptions& options);

struct CourseExcerpt {
    std::string doc_id;
    std::string text;

    bool operator==(const CourseExcerpt&) const = default;
};

struct PromptBundle {
    std::string system_role;
    std::vector<CourseExcerpt> course_context;
    std::string question_title;
    std::string question_body;
    std::vector<std::string> history;
    RepromptOptions modifiers;
    int token_budget = 4096;

    bool operator==(const PromptBundle&) const = default;
};

struct PromptRecord {
    std::string text;
    PromptBundle bundle;

    bool operator==(const PromptRecord&) const = default;
};

struct TokenUsage {
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;

    bool operator==(const TokenUsage&) const = default;
};

struct Draft {
    int index = 0;
    PromptRecord prompt_record;
    std::string raw_output;
    std::optional<std::string> edited_output;
    std::string model_id;
    TokenUsage token_usage;
    std::int64_t latency_ms = 0;
    Timestamp created_at{};

    const std::string& published_text() const { return edited_output ? *edited_output : raw_output; }

    bool operator==(const Draft&) const = default;
};

enum class ActionKind { Approve, Edit, Reprompt, Dismiss };

struct EditPayload {
    std::string text;
    double distance = 0.0;  // normalized Levenshtein vs. the draft's raw_output

    bool operator==(const EditPayload&) const = default;
};

struct ReviewAction {
    std::string actor_id;
    ActionKind kind = ActionKind::Approve;
    Timestamp at{};
    // Absent only for a DISMISS of an item that never produced a draft.
    std::optional<int> draft_index;
    std::optional<EditPayload> edit_payload;
    std::optional<RepromptOptions> reprompt_payload;
    std::optional<std::string> note;

    bool operator==(const ReviewAction&) const = default;
};

enum class ItemState { New, Generating, AwaitingReview, Approved, Posted, Failed, Dismissed };

inline constexpr ItemState kAllStates[] = {ItemState::New,      ItemState::Generating, ItemState::AwaitingReview,
                                           ItemState::Approved, ItemState::Posted,     ItemState::Failed,
                                           ItemState::Dismissed};

// System-side audit trail entry; human interventions live in WorkItem::actions.
struct TransitionRecord {
    std::string event;
    ItemState from = ItemState::New;
    ItemState to = ItemState::New;
    Timestamp at{};
    std::optional<std::string> detail;

    bool operator==(const TransitionRecord&) const = default;
};

struct WorkItem {
    std::string item_id;
    StudentPost post;
    ItemState state = ItemState::New;
    std::vector<Draft> drafts;
    std::vector<ReviewAction> actions;
    std::vector<TransitionRecord> transitions;
    int attempts = 0;
    std::int64_t version = 0;

    const Draft* latest_draft() const { return drafts.empty() ? nullptr : &drafts.back(); }

    bool operator==(const WorkItem&) const = default;
};

std::string_view to_string(ItemState state);
std::string_view to_string(ActionKind kind);
std::string_view to_string(DetailLevel level);
ItemState item_state_from_string(std::string_view text);
ActionKind action_kind_from_string(std::string_view text);
DetailLevel detail_level_from_string(std::string_view text);

// Stable work-item id for a (course, post) pair.
std::string make_item_id(std::string_view course_id, std::string_view post_id);

// Throws InvalidArgument when post_id or body is empty.
void validate(const StudentPost& post);

}  // namespace tai
