#include "tai/domain.hpp"

#include "tai/error.hpp"
#include "tai/text.hpp"

namespace tai {

namespace {

template <typename Enum, std::size_t N>
Enum lookup(std::string_view text, const std::pair<Enum, std::string_view> (&table)[N], const char* what) {
    for (const auto& [value, name] : table) {
        if (name == text) return value;
    }
    fail(ErrorCode::InvalidArgument, std::string("unknown ") + what + ": " + std::string(text));
}

constexpr std::pair<ItemState, std::string_view> kStateNames[] = {
    {ItemState::New, "NEW"},
    {ItemState::Generating, "GENERATING"},
    {ItemState::AwaitingReview, "AWAITING_REVIEW"},
    {ItemState::Approved, "APPROVED"},
    {ItemState::Posted, "POSTED"},
    {ItemState::Failed, "FAILED"},
    {ItemState::Dismissed, "DISMISSED"},
};

constexpr std::pair<ActionKind, std::string_view> kActionNames[] = {
    {ActionKind::Approve, "APPROVE"},
    {ActionKind::Edit, "EDIT"},
    {ActionKind::Reprompt, "REPROMPT"},
    {ActionKind::Dismiss, "DISMISS"},
};

constexpr std::pair<DetailLevel, std::string_view> kDetailNames[] = {
    {DetailLevel::Concise, "CONCISE"},
    {DetailLevel::Standard, "STANDARD"},
    {DetailLevel::Detailed, "DETAILED"},
};

template <typename Enum, std::size_t N>
std::string_view name_of(Enum value, const std::pair<Enum, std::string_view> (&table)[N]) {
    for (const auto& [v, name] : table) {
        if (v == value) return name;
    }
    return "?";
}

}  // namespace

std::string_view to_string(ItemState state) { return name_of(state, kStateNames); }
std::string_view to_string(ActionKind kind) { return name_of(kind, kActionNames); }
std::string_view to_string(DetailLevel level) { return name_of(level, kDetailNames); }

ItemState item_state_from_string(std::string_view text) { return lookup(text, kStateNames, "state"); }
ActionKind action_kind_from_string(std::string_view text) { return lookup(text, kActionNames, "action kind"); }
DetailLevel detail_level_from_string(std::string_view text) { return lookup(text, kDetailNames, "detail level"); }

void validate(const RepromptOptions& options) {
    if (options.custom_instructions && text::trim(*options.custom_instructions).empty()) {
        fail(ErrorCode::InvalidArgument, "custom_instructions must not be blank");
    }
}

void validate(const StudentPost& post) {
    if (post.post_id.empty()) fail(ErrorCode::InvalidArgument, "post_id must not be empty");
    if (post.body.empty()) fail(ErrorCode::InvalidArgument, "post " + post.post_id + " has an empty body");
}

std::string make_item_id(std::string_view course_id, std::string_view post_id) {
    std::string key;
    key.reserve(course_id.size() + post_id.size() + 1);
    key.append(course_id);
    key.push_back('\0');
    key.append(post_id);
    return "itm-" + text::hex64(text::fnv1a64(key));
}

}  // namespace tai
