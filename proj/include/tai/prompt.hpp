#pragma once

#include <span>
#include <string>
#include <string_view>

#include "tai/course.hpp"
#include "tai/domain.hpp"

namespace tai::prompt {

// Fixed template sentences. Tests and downstream tooling match on these.
inline constexpr std::string_view kGuidanceDirective =
    "Guide the student toward a solution; do not provide the complete answer.";
inline constexpr std::string_view kToneDirective =
    "Write in the friendly, professional voice of a human teaching assistant replying on the course forum.";
inline constexpr std::string_view kCodeAllowed = "You may include short code snippets when they make the explanation clearer.";
inline constexpr std::string_view kCodeForbidden = "Do not include code in your response.";
inline constexpr std::string_view kDetailConcise = "Keep the response brief.";
inline constexpr std::string_view kDetailStandard = "Give a focused explanation of moderate length.";
inline constexpr std::string_view kDetailDetailed = "Explain step by step in detail.";

// Segment labels, emitted in this order, each on its own line.
inline constexpr std::string_view kRoleLabel = "=== ROLE ===";
inline constexpr std::string_view kContextLabel = "=== COURSE CONTEXT ===";
inline constexpr std::string_view kHistoryLabel = "=== HISTORY ===";
inline constexpr std::string_view kQuestionLabel = "=== QUESTION ===";
inline constexpr std::string_view kConstraintsLabel = "=== CONSTRAINTS ===";
inline constexpr std::string_view kCustomLabel = "=== CUSTOM ===";

inline constexpr int kDefaultHistoryWindow = 3;

PromptBundle build_base_prompt(const CourseConfig& course, const StudentPost& post);

// Replaces the modifiers with `options`; keeps the raw output of the last
// `history_window` prior drafts when options.preserve_history is set.
PromptBundle apply_reprompt(const PromptBundle& bundle, const RepromptOptions& options,
                            std::span<const Draft> prior_drafts, int history_window = kDefaultHistoryWindow);

// Deterministic. When the estimate exceeds bundle.token_budget the course
// context is cut back from the last excerpt forward; nothing else is touched.
std::string render(const PromptBundle& bundle);

// ceil(bytes / 4)
std::size_t estimate_tokens(std::string_view text);

// Body of the QUESTION segment of a rendered prompt, or the whole text if the
// segment is not found.
std::string_view question_segment(std::string_view rendered);

std::string_view detail_sentence(DetailLevel level);

}  // namespace tai::prompt
