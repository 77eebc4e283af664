#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tai/domain.hpp"
#include "tai/store.hpp"

namespace tai::analytics {

struct InterventionSummary {
    std::optional<std::string> course_id;  // nullopt = all courses
    int items_total = 0;
    int approved_unedited = 0;  // APPROVED/POSTED with no EDIT
    int edited = 0;             // APPROVED/POSTED with at least one EDIT
    int dismissed = 0;
    int pending = 0;  // everything else (generating, awaiting review, failed)
    std::map<int, int> reprompt_histogram;  // reprompts per item -> items
    double mean_edit_distance = 0.0;        // over all EDIT actions
    double mean_drafts_per_item = 0.0;

    bool operator==(const InterventionSummary&) const = default;
};

InterventionSummary intervention_summary(const std::vector<WorkItem>& items,
                                         const std::optional<std::string>& course_id = std::nullopt);
InterventionSummary intervention_summary(const DocumentStore& store,
                                         const std::optional<std::string>& course_id = std::nullopt);

nlohmann::json to_json(const InterventionSummary& summary);
// key=value lines, fixed order; stable for golden comparisons.
std::string format_summary(const InterventionSummary& summary);

using LikertLabels = std::array<std::string, 5>;

LikertLabels agreement_scale();
LikertLabels frequency_scale();

struct LikertTable {
    std::string question;
    LikertLabels labels;
    std::array<int, 5> counts{};
    int total = 0;
    std::array<double, 5> percents{};

    // Percent of row i with exactly one decimal, e.g. "75.0".
    std::string percent_text(std::size_t i) const;
};

// Rounds 100*count/total half-up to one decimal, in exact integer arithmetic.
// Returns tenths of a percent.
long long percent_tenths(long long count, long long total);
std::string format_tenths(long long tenths);

// Throws UnknownLabel or EmptyResponses.
LikertTable likert_aggregate(std::string question, const LikertLabels& labels,
                             const std::vector<std::string>& responses);

std::string format_table(const LikertTable& table);

struct SurveyResponse {
    std::string respondent_id;
    std::string question_id;
    std::string response_label;
    std::size_t row = 0;  // 1-based line number in the file
};

// Question id -> scale. Unlisted questions use the agreement scale; Q7 is a
// frequency question by default.
struct SurveyScales {
    std::map<std::string, LikertLabels> by_question{{"Q7", frequency_scale()}};
    LikertLabels fallback = agreement_scale();

    const LikertLabels& scale_for(const std::string& question_id) const;
};

// Parses CSV with header respondent_id,question_id,response_label. Throws
// ParseError or UnknownLabel, naming the offending row.
std::vector<SurveyResponse> survey_ingest(std::istream& in, const SurveyScales& scales = {});
std::vector<SurveyResponse> survey_ingest(const std::filesystem::path& path, const SurveyScales& scales = {});

// One table per question, in order of first appearance.
std::vector<LikertTable> aggregate_survey(const std::vector<SurveyResponse>& responses,
                                          const SurveyScales& scales = {});

}  // namespace tai::analytics
