#include "tai/analytics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "tai/codec.hpp"
#include "tai/error.hpp"

namespace tai::analytics {

InterventionSummary intervention_summary(const std::vector<WorkItem>& items,
                                         const std::optional<std::string>& course_id) {
    InterventionSummary s;
    s.course_id = course_id;
    long long drafts = 0;
    double distance_sum = 0.0;
    int edits = 0;
    for (const auto& item : items) {
        if (course_id && item.post.course_id != *course_id) continue;
        ++s.items_total;
        drafts += static_cast<long long>(item.drafts.size());
        int reprompts = 0;
        bool was_edited = false;
        for (const auto& a : item.actions) {
            if (a.kind == ActionKind::Reprompt) ++reprompts;
            if (a.kind == ActionKind::Edit) {
                was_edited = true;
                ++edits;
                if (a.edit_payload) distance_sum += a.edit_payload->distance;
            }
        }
        ++s.reprompt_histogram[reprompts];
        switch (item.state) {
        case ItemState::Approved:
        case ItemState::Posted: ++(was_edited ? s.edited : s.approved_unedited); break;
        case ItemState::Dismissed: ++s.dismissed; break;
        default: ++s.pending; break;
        }
    }
    if (edits > 0) s.mean_edit_distance = distance_sum / edits;
    if (s.items_total > 0) s.mean_drafts_per_item = static_cast<double>(drafts) / s.items_total;
    return s;
}

InterventionSummary intervention_summary(const DocumentStore& store, const std::optional<std::string>& course_id) {
    std::vector<WorkItem> items;
    for (const auto& record : store.scan(RecordKind::WorkItem)) items.push_back(record.payload.get<WorkItem>());
    return intervention_summary(items, course_id);
}

nlohmann::json to_json(const InterventionSummary& s) {
    nlohmann::json histogram = nlohmann::json::object();
    for (const auto& [reprompts, n] : s.reprompt_histogram) histogram[std::to_string(reprompts)] = n;
    return {{"course_id", s.course_id ? nlohmann::json(*s.course_id) : nlohmann::json(nullptr)},
            {"items_total", s.items_total},
            {"approved_unedited", s.approved_unedited},
            {"edited", s.edited},
            {"dismissed", s.dismissed},
            {"pending", s.pending},
            {"reprompt_count_histogram", histogram},
            {"mean_edit_distance", s.mean_edit_distance},
            {"mean_drafts_per_item", s.mean_drafts_per_item}};
}

std::string format_summary(const InterventionSummary& s) {
    std::ostringstream out;
    char buf[64];
    out << "course=" << (s.course_id ? *s.course_id : std::string("*")) << '\n';
    out << "items_total=" << s.items_total << '\n';
    out << "approved_unedited=" << s.approved_unedited << '\n';
    out << "edited=" << s.edited << '\n';
    out << "dismissed=" << s.dismissed << '\n';
    out << "pending=" << s.pending << '\n';
    out << "reprompt_histogram={";
    bool first = true;
    for (const auto& [reprompts, n] : s.reprompt_histogram) {
        out << (first ? "" : ", ") << reprompts << ':' << n;
        first = false;
    }
    out << "}\n";
    std::snprintf(buf, sizeof buf, "%.4f", s.mean_edit_distance);
    out << "mean_edit_distance=" << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.4f", s.mean_drafts_per_item);
    out << "mean_drafts_per_item=" << buf << '\n';
    return out.str();
}

LikertLabels agreement_scale() {
    return {"Strongly Disagree", "Somewhat Disagree", "Neutral", "Somewhat Agree", "Strongly Agree"};
}

LikertLabels frequency_scale() {
    return {"Never", "Sometimes", "About Half the Time", "Most of the Time", "Always"};
}

long long percent_tenths(long long count, long long total) {
    // round_half_up(1000 * count / total)
    return (2000 * count + total) / (2 * total);
}

std::string format_tenths(long long tenths) {
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

std::string LikertTable::percent_text(std::size_t i) const { return format_tenths(percent_tenths(counts.at(i), total)); }

LikertTable likert_aggregate(std::string question, const LikertLabels& labels,
                             const std::vector<std::string>& responses) {
    if (responses.empty()) fail(ErrorCode::EmptyResponses, "no responses for " + question);
    LikertTable t;
    t.question = std::move(question);
    t.labels = labels;
    for (const auto& r : responses) {
        const auto it = std::find(labels.begin(), labels.end(), r);
        if (it == labels.end()) fail(ErrorCode::UnknownLabel, "response \"" + r + "\" is not on the scale of " + t.question);
        ++t.counts[static_cast<std::size_t>(it - labels.begin())];
    }
    t.total = static_cast<int>(responses.size());
    for (std::size_t i = 0; i < 5; ++i) t.percents[i] = percent_tenths(t.counts[i], t.total) / 10.0;
    return t;
}

std::string format_table(const LikertTable& t) {
    std::ostringstream out;
    char buf[128];
    out << t.question << '\n';
    std::snprintf(buf, sizeof buf, "%-22s %6s %8s\n", "", "Count", "Percent");
    out << buf;
    for (std::size_t i = 0; i < 5; ++i) {
        std::snprintf(buf, sizeof buf, "%-22s %6d %8s\n", t.labels[i].c_str(), t.counts[i], t.percent_text(i).c_str());
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "%-22s %6d %8s\n", "Total", t.total, "100.0");
    out << buf;
    return out.str();
}

const LikertLabels& SurveyScales::scale_for(const std::string& question_id) const {
    const auto it = by_question.find(question_id);
    return it == by_question.end() ? fallback : it->second;
}

}  // namespace tai::analytics
