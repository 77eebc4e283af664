#include "tai/course.hpp"

#include <set>

#include "tai/error.hpp"

namespace tai {

void validate(const CourseConfig& course) {
    if (course.course_id.empty()) fail(ErrorCode::ConfigError, "course_id must not be empty");
    if (course.poll_interval_s < 5) {
        fail(ErrorCode::ConfigError, "course " + course.course_id + ": poll_interval_s must be at least 5");
    }
    if (course.token_budget <= 0) fail(ErrorCode::ConfigError, "course " + course.course_id + ": bad token_budget");
    if (course.history_window <= 0) {
        fail(ErrorCode::ConfigError, "course " + course.course_id + ": bad history_window");
    }
    std::set<std::string> seen;
    for (const auto& doc : course.documents) {
        if (!seen.insert(doc.doc_id).second) {
            fail(ErrorCode::ConfigError, "course " + course.course_id + ": duplicate document id " + doc.doc_id);
        }
    }
}

}  // namespace tai
