#include "tai/codec.hpp"

#include "tai/error.hpp"

namespace tai {

using nlohmann::json;

namespace {

template <typename T>
json opt(const std::optional<T>& value) {
    return value ? json(*value) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<T>();
}

Timestamp get_time(const json& j, const char* key) { return parse_rfc3339(j.at(key).get<std::string>()); }

}  // namespace

void to_json(json& j, const StudentPost& v) {
    j = json{{"post_id", v.post_id},
             {"thread_id", v.thread_id},
             {"course_id", v.course_id},
             {"title", v.title},
             {"body", v.body},
             {"author_label", v.author_label},
             {"created_at", format_rfc3339(v.created_at)},
             {"category", opt(v.category)},
             {"answered", v.answered}};
}

void from_json(const json& j, StudentPost& v) {
    v.post_id = j.at("post_id").get<std::string>();
    v.thread_id = j.at("thread_id").get<std::string>();
    v.course_id = j.at("course_id").get<std::string>();
    v.title = j.at("title").get<std::string>();
    v.body = j.at("body").get<std::string>();
    v.author_label = j.at("author_label").get<std::string>();
    v.created_at = get_time(j, "created_at");
    v.category = get_opt<std::string>(j, "category");
    v.answered = j.at("answered").get<bool>();
}

void to_json(json& j, const RepromptOptions& v) {
    j = json{{"preserve_history", v.preserve_history},
             {"code_allowed", v.code_allowed},
             {"detail_level", to_string(v.detail_level)},
             {"custom_instructions", opt(v.custom_instructions)}};
}

void from_json(const json& j, RepromptOptions& v) {
    v.preserve_history = j.value("preserve_history", false);
    v.code_allowed = j.value("code_allowed", true);
    v.detail_level = detail_level_from_string(j.value("detail_level", std::string("STANDARD")));
    v.custom_instructions = get_opt<std::string>(j, "custom_instructions");
}

void to_json(json& j, const CourseExcerpt& v) { j = json{{"doc_id", v.doc_id}, {"text", v.text}}; }

void from_json(const json& j, CourseExcerpt& v) {
    v.doc_id = j.at("doc_id").get<std::string>();
    v.text = j.at("text").get<std::string>();
}

void to_json(json& j, const PromptBundle& v) {
    j = json{{"system_role", v.system_role},
             {"course_context", v.course_context},
             {"question", json{{"title", v.question_title}, {"body", v.question_body}}},
             {"history", v.history},
             {"modifiers", v.modifiers},
             {"token_budget", v.token_budget}};
}

void from_json(const json& j, PromptBundle& v) {
    v.system_role = j.at("system_role").get<std::string>();
    v.course_context = j.at("course_context").get<std::vector<CourseExcerpt>>();
    v.question_title = j.at("question").at("title").get<std::string>();
    v.question_body = j.at("question").at("body").get<std::string>();
    v.history = j.at("history").get<std::vector<std::string>>();
    v.modifiers = j.at("modifiers").get<RepromptOptions>();
    v.token_budget = j.at("token_budget").get<int>();
}

void to_json(json& j, const PromptRecord& v) { j = json{{"text", v.text}, {"bundle", v.bundle}}; }

void from_json(const json& j, PromptRecord& v) {
    v.text = j.at("text").get<std::string>();
    v.bundle = j.at("bundle").get<PromptBundle>();
}

void to_json(json& j, const Draft& v) {
    j = json{{"index", v.index},
             {"prompt_record", v.prompt_record},
             {"raw_output", v.raw_output},
             {"edited_output", opt(v.edited_output)},
             {"model_id", v.model_id},
             {"token_usage", json{{"input", v.token_usage.input_tokens}, {"output", v.token_usage.output_tokens}}},
             {"latency_ms", v.latency_ms},
             {"created_at", format_rfc3339(v.created_at)}};
}

void from_json(const json& j, Draft& v) {
    v.index = j.at("index").get<int>();
    v.prompt_record = j.at("prompt_record").get<PromptRecord>();
    v.raw_output = j.at("raw_output").get<std::string>();
    v.edited_output = get_opt<std::string>(j, "edited_output");
    v.model_id = j.at("model_id").get<std::string>();
    v.token_usage.input_tokens = j.at("token_usage").at("input").get<std::int64_t>();
    v.token_usage.output_tokens = j.at("token_usage").at("output").get<std::int64_t>();
    v.latency_ms = j.at("latency_ms").get<std::int64_t>();
    v.created_at = get_time(j, "created_at");
}

void to_json(json& j, const ReviewAction& v) {
    json edit = nullptr;
    if (v.edit_payload) edit = json{{"text", v.edit_payload->text}, {"distance", v.edit_payload->distance}};
    j = json{{"actor_id", v.actor_id},
             {"kind", to_string(v.kind)},
             {"at", format_rfc3339(v.at)},
             {"draft_index", opt(v.draft_index)},
             {"edit_payload", edit},
             {"reprompt_payload", opt(v.reprompt_payload)},
             {"note", opt(v.note)}};
}

void from_json(const json& j, ReviewAction& v) {
    v.actor_id = j.at("actor_id").get<std::string>();
    v.kind = action_kind_from_string(j.at("kind").get<std::string>());
    v.at = get_time(j, "at");
    v.draft_index = get_opt<int>(j, "draft_index");
    v.edit_payload.reset();
    if (const auto it = j.find("edit_payload"); it != j.end() && !it->is_null()) {
        v.edit_payload = EditPayload{it->at("text").get<std::string>(), it->at("distance").get<double>()};
    }
    v.reprompt_payload = get_opt<RepromptOptions>(j, "reprompt_payload");
    v.note = get_opt<std::string>(j, "note");
}

void to_json(json& j, const TransitionRecord& v) {
    j = json{{"event", v.event},
             {"from", to_string(v.from)},
             {"to", to_string(v.to)},
             {"at", format_rfc3339(v.at)},
             {"detail", opt(v.detail)}};
}

void from_json(const json& j, TransitionRecord& v) {
    v.event = j.at("event").get<std::string>();
    v.from = item_state_from_string(j.at("from").get<std::string>());
    v.to = item_state_from_string(j.at("to").get<std::string>());
    v.at = get_time(j, "at");
    v.detail = get_opt<std::string>(j, "detail");
}

void to_json(json& j, const WorkItem& v) {
    j = json{{"item_id", v.item_id},
             {"course_id", v.post.course_id},
             {"post", v.post},
             {"state", to_string(v.state)},
             {"drafts", v.drafts},
             {"actions", v.actions},
             {"transitions", v.transitions},
             {"attempts", v.attempts},
             {"version", v.version}};
}

void from_json(const json& j, WorkItem& v) {
    v.item_id = j.at("item_id").get<std::string>();
    v.post = j.at("post").get<StudentPost>();
    v.state = item_state_from_string(j.at("state").get<std::string>());
    v.drafts = j.at("drafts").get<std::vector<Draft>>();
    v.actions = j.at("actions").get<std::vector<ReviewAction>>();
    v.transitions = j.value("transitions", std::vector<TransitionRecord>{});
    v.attempts = j.at("attempts").get<int>();
    v.version = j.at("version").get<std::int64_t>();
}

}  // namespace tai
