#include "tai/prompt.hpp"

#include <algorithm>

#include "tai/error.hpp"
#include "tai/text.hpp"

namespace tai::prompt {

namespace {

constexpr std::string_view kNone = "(none)";

void check(const PromptBundle& bundle) {
    if (bundle.system_role.empty()) fail(ErrorCode::InvalidArgument, "system_role must not be empty");
    if (bundle.token_budget <= 0) fail(ErrorCode::InvalidArgument, "token_budget must be positive");
    if (bundle.question_body.empty()) fail(ErrorCode::EmptyQuestion, "question body must not be empty");
    if (!bundle.history.empty() && !bundle.modifiers.preserve_history) {
        fail(ErrorCode::InvalidArgument, "history present but preserve_history is off");
    }
    validate(bundle.modifiers);
}

void segment(std::string& out, std::string_view label) {
    if (!out.empty()) out += "\n";
    out += label;
    out += "\n";
}

std::string compose(const PromptBundle& bundle, const std::vector<CourseExcerpt>& context) {
    std::string out;
    segment(out, kRoleLabel);
    out += bundle.system_role;
    out += "\n";

    segment(out, kContextLabel);
    if (context.empty()) {
        out += kNone;
        out += "\n";
    }
    for (const auto& excerpt : context) {
        out += "[" + excerpt.doc_id + "]\n";
        out += excerpt.text;
        out += "\n";
    }

    segment(out, kHistoryLabel);
    if (bundle.history.empty()) {
        out += kNone;
        out += "\n";
    }
    for (std::size_t i = 0; i < bundle.history.size(); ++i) {
        out += "[Previous draft " + std::to_string(i + 1) + "]\n";
        out += bundle.history[i];
        out += "\n";
    }

    segment(out, kQuestionLabel);
    if (!bundle.question_title.empty()) {
        out += "Title: ";
        out += bundle.question_title;
        out += "\n\n";
    }
    out += bundle.question_body;
    out += "\n";

    segment(out, kConstraintsLabel);
    out += bundle.modifiers.code_allowed ? kCodeAllowed : kCodeForbidden;
    out += "\n";
    out += detail_sentence(bundle.modifiers.detail_level);
    out += "\n";

    segment(out, kCustomLabel);
    out += bundle.modifiers.custom_instructions ? std::string_view(*bundle.modifiers.custom_instructions) : kNone;
    out += "\n";
    return out;
}

}  // namespace

std::string_view detail_sentence(DetailLevel level) {
    switch (level) {
    case DetailLevel::Concise: return kDetailConcise;
    case DetailLevel::Standard: return kDetailStandard;
    case DetailLevel::Detailed: return kDetailDetailed;
    }
    return kDetailStandard;
}

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

PromptBundle build_base_prompt(const CourseConfig& course, const StudentPost& post) {
    if (post.body.empty()) fail(ErrorCode::EmptyQuestion, "post " + post.post_id + " has an empty body");

    const std::string& name = course.display_name.empty() ? course.course_id : course.display_name;
    PromptBundle bundle;
    bundle.system_role = "You are an objective teaching assistant for " + name +
                         ", an undergraduate Computer Science course, answering student posts on its "
                         "discussion board.\n" +
                         std::string(kGuidanceDirective) + "\n" + std::string(kToneDirective);
    for (const auto& doc : course.documents) bundle.course_context.push_back({doc.doc_id, doc.text});
    bundle.question_title = post.title;
    bundle.question_body = post.body;
    bundle.token_budget = course.token_budget;
    return bundle;
}

PromptBundle apply_reprompt(const PromptBundle& bundle, const RepromptOptions& options,
                            std::span<const Draft> prior_drafts, int history_window) {
    if (prior_drafts.empty()) fail(ErrorCode::NoPriorDraft, "a reprompt requires at least one prior draft");
    if (history_window <= 0) fail(ErrorCode::InvalidArgument, "history_window must be positive");
    validate(options);

    PromptBundle next = bundle;
    next.modifiers = options;
    next.history.clear();
    if (options.preserve_history) {
        const std::size_t keep = std::min(prior_drafts.size(), static_cast<std::size_t>(history_window));
        for (const auto& draft : prior_drafts.subspan(prior_drafts.size() - keep)) {
            next.history.push_back(draft.raw_output);
        }
    }
    return next;
}

std::string render(const PromptBundle& bundle) {
    check(bundle);
    const std::size_t limit = static_cast<std::size_t>(bundle.token_budget) * 4;

    std::vector<CourseExcerpt> context = bundle.course_context;
    std::string text = compose(bundle, context);
    if (text.size() <= limit) return text;

    if (compose(bundle, {}).size() > limit) {
        fail(ErrorCode::BudgetImpossible, "question and fixed segments exceed the token budget of " +
                                              std::to_string(bundle.token_budget));
    }
    for (;;) {
        text = compose(bundle, context);
        if (text.size() <= limit) return text;
        const std::size_t excess = text.size() - limit;
        auto& last = context.back();
        if (last.text.size() > excess) {
            last.text = std::string(text::prefix_bytes(last.text, last.text.size() - excess));
            if (!last.text.empty()) continue;
        }
        context.pop_back();
    }
}

std::string_view question_segment(std::string_view rendered) {
    const std::string open = std::string(kQuestionLabel) + "\n";
    const std::string close = "\n" + std::string(kConstraintsLabel) + "\n";
    std::size_t start = std::string_view::npos;
    if (rendered.substr(0, open.size()) == open) {
        start = 0;
    } else if (const auto pos = rendered.find("\n" + open); pos != std::string_view::npos) {
        start = pos + 1;
    }
    if (start == std::string_view::npos) return rendered;
    start += open.size();
    const auto end = rendered.find(close, start);
    std::string_view body = rendered.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    while (!body.empty() && body.back() == '\n') body.remove_suffix(1);
    return body;
}

}  // namespace tai::prompt
