#pragma once

#include <nlohmann/json.hpp>

#include "tai/domain.hpp"

// JSON mapping for the domain types. Optional fields are written as null so
// every document of a given type has the same key set.
namespace tai {

void to_json(nlohmann::json& j, const StudentPost& v);
void from_json(const nlohmann::json& j, StudentPost& v);
void to_json(nlohmann::json& j, const RepromptOptions& v);
void from_json(const nlohmann::json& j, RepromptOptions& v);
void to_json(nlohmann::json& j, const CourseExcerpt& v);
void from_json(const nlohmann::json& j, CourseExcerpt& v);
void to_json(nlohmann::json& j, const PromptBundle& v);
void from_json(const nlohmann::json& j, PromptBundle& v);
void to_json(nlohmann::json& j, const PromptRecord& v);
void from_json(const nlohmann::json& j, PromptRecord& v);
void to_json(nlohmann::json& j, const Draft& v);
void from_json(const nlohmann::json& j, Draft& v);
void to_json(nlohmann::json& j, const ReviewAction& v);
void from_json(const nlohmann::json& j, ReviewAction& v);
void to_json(nlohmann::json& j, const TransitionRecord& v);
void from_json(const nlohmann::json& j, TransitionRecord& v);
void to_json(nlohmann::json& j, const WorkItem& v);
void from_json(const nlohmann::json& j, WorkItem& v);

}  // namespace tai
