#pragma once

#include <string>
#include <vector>

namespace tai {

struct ForumCredentials {
    std::string base_url;
    std::string api_token;  // never serialized
    std::string course_ref;
};

struct ModelConfig {
    std::string model_id = "gpt-4";
    double temperature = 0.2;
    int max_output_tokens = 800;
};

struct CourseDocument {
    std::string doc_id;
    std::string text;
};

struct CourseConfig {
    std::string course_id;
    std::string display_name;  // defaults to course_id in prompts when empty
    ForumCredentials forum;
    std::vector<CourseDocument> documents;  // in prompt priority order
    int poll_interval_s = 60;
    ModelConfig model;
    int token_budget = 4096;
    int history_window = 3;
};

// Throws ConfigError on: empty course_id, poll_interval_s < 5, duplicate
// document ids, non-positive token_budget or history_window.
void validate(const CourseConfig& course);

}  // namespace tai
