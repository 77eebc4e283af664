#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tai/analytics.hpp"
#include "tai/domain.hpp"
#include "tai/forum.hpp"

namespace tai {

// One scripted review decision:
//   {"post_id": "p1", "action": "approve" | "edit" | "reprompt" | "dismiss",
//    "payload": {...}, "actor": "ta1", "course_id": "CS180", "note": "..."}
// payload is {"text": ...} for edit and RepromptOptions for reprompt; actor,
// course_id and note are optional.
struct ReplayStep {
    std::string post_id;
    std::optional<std::string> course_id;
    ActionKind action = ActionKind::Approve;
    nlohmann::json payload = nlohmann::json::object();
    std::string actor = "replay";
    std::optional<std::string> note;
};

std::vector<ReplayStep> parse_review_script(const nlohmann::json& doc);
std::vector<ReplayStep> load_review_script(const std::filesystem::path& path);

struct ReplayResult {
    std::vector<WorkItem> items;
    std::vector<PostedAnswer> answers;
    analytics::InterventionSummary summary;
    std::string report;  // format_summary + forum_answers line
};

// Runs every post in <fixture_dir>/posts.json through the pipeline against the
// in-process forum and mock model, applying `steps` in order. Course settings
// come from <fixture_dir>/courses.json when present. Deterministic: the clock
// starts one minute after the newest post and advances one second per read.
ReplayResult run_replay(const std::filesystem::path& fixture_dir, const std::vector<ReplayStep>& steps);

}  // namespace tai
