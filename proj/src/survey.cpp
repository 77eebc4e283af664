#include <algorithm>
#include <fstream>
#include <istream>
#include <iterator>

#include "tai/analytics.hpp"
#include "tai/error.hpp"
#include "tai/text.hpp"

namespace tai::analytics {

namespace {

struct CsvRow {
    std::vector<std::string> fields;
    std::size_t line = 0;
};

// RFC 4180 style: quoted fields may contain commas, newlines and "" escapes.
std::vector<CsvRow> parse_csv(std::string_view data) {
    if (data.substr(0, 3) == "\xEF\xBB\xBF") data.remove_prefix(3);
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    std::size_t line = 1;
    row.line = 1;
    bool in_quotes = false;
    bool quoted_field = false;

    auto end_field = [&] {
        row.fields.push_back(quoted_field ? field : std::string(text::trim(field)));
        field.clear();
        quoted_field = false;
    };
    auto end_row = [&] {
        end_field();
        const bool blank = row.fields.size() == 1 && row.fields[0].empty();
        if (!blank) rows.push_back(std::move(row));
        row = CsvRow{};
        row.line = line;
    };

    for (std::size_t i = 0; i < data.size(); ++i) {
        const char c = data[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < data.size() && data[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!text::trim(field).empty()) {
                fail(ErrorCode::ParseError, "row " + std::to_string(line) + ": stray quote");
            }
            field.clear();
            in_quotes = true;
            quoted_field = true;
            break;
        case ',': end_field(); break;
        case '\r': break;
        case '\n':
            ++line;
            end_row();
            break;
        default: field.push_back(c); break;
        }
    }
    if (in_quotes) fail(ErrorCode::ParseError, "row " + std::to_string(row.line) + ": unterminated quote");
    if (!field.empty() || !row.fields.empty() || quoted_field) end_row();
    return rows;
}

}  // namespace

std::vector<SurveyResponse> survey_ingest(std::istream& in, const SurveyScales& scales) {
    const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    const auto rows = parse_csv(data);
    if (rows.empty()) fail(ErrorCode::ParseError, "row 1: missing header");

    const std::vector<std::string> header{"respondent_id", "question_id", "response_label"};
    if (rows.front().fields != header) {
        fail(ErrorCode::ParseError, "row " + std::to_string(rows.front().line) +
                                        ": header must be respondent_id,question_id,response_label");
    }

    std::vector<SurveyResponse> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string where = "row " + std::to_string(row.line);
        if (row.fields.size() != 3) {
            fail(ErrorCode::ParseError, where + ": expected 3 columns, found " + std::to_string(row.fields.size()));
        }
        if (row.fields[1].empty()) fail(ErrorCode::ParseError, where + ": empty question_id");
        SurveyResponse r{row.fields[0], row.fields[1], row.fields[2], row.line};
        const auto& scale = scales.scale_for(r.question_id);
        if (std::find(scale.begin(), scale.end(), r.response_label) == scale.end()) {
            fail(ErrorCode::UnknownLabel,
                 where + ": \"" + r.response_label + "\" is not on the scale for " + r.question_id);
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<SurveyResponse> survey_ingest(const std::filesystem::path& path, const SurveyScales& scales) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::ParseError, "cannot open survey file " + path.string());
    return survey_ingest(in, scales);
}

std::vector<LikertTable> aggregate_survey(const std::vector<SurveyResponse>& responses, const SurveyScales& scales) {
    if (responses.empty()) fail(ErrorCode::EmptyResponses, "survey has no responses");
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::string>> by_question;
    for (const auto& r : responses) {
        auto [it, inserted] = by_question.try_emplace(r.question_id);
        if (inserted) order.push_back(r.question_id);
        it->second.push_back(r.response_label);
    }
    std::vector<LikertTable> tables;
    for (const auto& q : order) tables.push_back(likert_aggregate(q, scales.scale_for(q), by_question[q]));
    return tables;
}

}  // namespace tai::analytics
