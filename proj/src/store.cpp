#include "tai/store.hpp"

#include <istream>
#include <mutex>
#include <ostream>

#include "tai/error.hpp"

namespace tai {

using nlohmann::json;

namespace {

constexpr std::string_view kRedacted = "[REDACTED]";

void redact(json& value, const std::vector<std::string>& secrets) {
    if (value.is_string()) {
        auto s = value.get<std::string>();
        bool changed = false;
        for (const auto& secret : secrets) {
            if (secret.empty()) continue;
            for (auto pos = s.find(secret); pos != std::string::npos; pos = s.find(secret, pos + kRedacted.size())) {
                s.replace(pos, secret.size(), kRedacted);
                changed = true;
            }
        }
        if (changed) value = s;
    } else if (value.is_structured()) {
        for (auto& child : value) redact(child, secrets);
    }
}

const json* find_field(const json& payload, const char* key) {
    if (!payload.is_object()) return nullptr;
    if (const auto it = payload.find(key); it != payload.end() && !it->is_null()) return &*it;
    if (const auto post = payload.find("post"); post != payload.end() && post->is_object()) {
        if (const auto it = post->find(key); it != post->end() && !it->is_null()) return &*it;
    }
    return nullptr;
}

StoredRecord record_from_json(const json& doc) {
    StoredRecord r;
    r.kind = record_kind_from_string(doc.at("kind").get<std::string>());
    r.key = doc.at("key").get<std::string>();
    r.version = doc.at("version").get<std::int64_t>();
    r.payload = doc.at("payload");
    return r;
}

json record_to_json(const StoredRecord& r) {
    return json{{"kind", to_string(r.kind)}, {"key", r.key}, {"version", r.version}, {"payload", r.payload}};
}

}  // namespace

std::string_view to_string(RecordKind kind) {
    switch (kind) {
    case RecordKind::WorkItem: return "WORK_ITEM";
    case RecordKind::MetricsEvent: return "METRICS_EVENT";
    case RecordKind::SurveyResponse: return "SURVEY_RESPONSE";
    }
    return "?";
}

RecordKind record_kind_from_string(std::string_view text) {
    if (text == "WORK_ITEM") return RecordKind::WorkItem;
    if (text == "METRICS_EVENT") return RecordKind::MetricsEvent;
    if (text == "SURVEY_RESPONSE") return RecordKind::SurveyResponse;
    fail(ErrorCode::InvalidArgument, "unknown record kind: " + std::string(text));
}

bool ExportFilter::matches(const StoredRecord& record) const {
    if (kind && record.kind != *kind) return false;
    if (course_id) {
        const json* v = find_field(record.payload, "course_id");
        if (!v || !v->is_string() || v->get<std::string>() != *course_id) return false;
    }
    if (state) {
        const json* v = find_field(record.payload, "state");
        if (!v || !v->is_string() || v->get<std::string>() != *state) return false;
    }
    if (from || to) {
        const json* v = find_field(record.payload, "at");
        if (!v) v = find_field(record.payload, "created_at");
        if (!v || !v->is_string()) return false;
        Timestamp t;
        try {
            t = parse_rfc3339(v->get<std::string>());
        } catch (const Error&) {
            return false;
        }
        if (from && t < *from) return false;
        if (to && t >= *to) return false;
    }
    return true;
}

DocumentStore::DocumentStore(std::filesystem::path journal) : journal_path_(std::move(journal)) {
    if (std::filesystem::exists(*journal_path_)) {
        std::ifstream in(*journal_path_);
        if (!in) fail(ErrorCode::StorageFailure, "cannot read journal " + journal_path_->string());
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const json doc = json::parse(line, nullptr, false);
            if (doc.is_discarded()) {
                fail(ErrorCode::StorageFailure,
                     "corrupt journal " + journal_path_->string() + " at line " + std::to_string(line_no));
            }
            StoredRecord r = record_from_json(doc);
            records_[{r.kind, r.key}] = std::move(r);
        }
    } else if (journal_path_->has_parent_path()) {
        std::filesystem::create_directories(journal_path_->parent_path());
    }
    journal_.open(*journal_path_, std::ios::app);
    if (!journal_) fail(ErrorCode::StorageFailure, "cannot open journal " + journal_path_->string());
}

void DocumentStore::append_journal(const StoredRecord& record) {
    if (!journal_path_) return;
    journal_ << record_to_json(record).dump() << '\n';
    journal_.flush();
    if (!journal_) fail(ErrorCode::StorageFailure, "journal write failed: " + journal_path_->string());
}

std::int64_t DocumentStore::save(RecordKind kind, const std::string& key, json payload,
                                 std::int64_t expected_version) {
    std::unique_lock lock(mutex_);
    const auto it = records_.find({kind, key});
    const std::int64_t current = it == records_.end() ? 0 : it->second.version;
    if (current != expected_version) {
        fail(ErrorCode::StaleVersion, std::string(to_string(kind)) + " " + key + " is at version " +
                                          std::to_string(current) + ", caller expected " +
                                          std::to_string(expected_version));
    }
    StoredRecord record{kind, key, current + 1, std::move(payload)};
    append_journal(record);
    records_[{kind, key}] = std::move(record);
    return current + 1;
}

std::optional<StoredRecord> DocumentStore::get(RecordKind kind, const std::string& key) const {
    std::shared_lock lock(mutex_);
    const auto it = records_.find({kind, key});
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

std::vector<StoredRecord> DocumentStore::scan(std::optional<RecordKind> kind) const {
    std::shared_lock lock(mutex_);
    std::vector<StoredRecord> out;
    for (const auto& [k, r] : records_) {
        if (!kind || k.first == *kind) out.push_back(r);
    }
    return out;
}

std::size_t DocumentStore::size() const {
    std::shared_lock lock(mutex_);
    return records_.size();
}

void DocumentStore::add_secret(std::string secret) {
    std::unique_lock lock(mutex_);
    if (!secret.empty()) secrets_.push_back(std::move(secret));
}

std::string DocumentStore::export_line(const StoredRecord& record, const std::vector<std::string>& secrets) {
    json doc = record_to_json(record);
    if (!secrets.empty()) redact(doc, secrets);
    return doc.dump();
}

std::size_t DocumentStore::export_json(std::ostream& out, const ExportFilter& filter) const {
    std::vector<StoredRecord> snapshot;
    std::vector<std::string> secrets;
    {
        std::shared_lock lock(mutex_);
        secrets = secrets_;
        for (const auto& [k, r] : records_) {
            if (filter.matches(r)) snapshot.push_back(r);
        }
    }
    for (const auto& r : snapshot) out << export_line(r, secrets) << '\n';
    out.flush();
    if (!out) fail(ErrorCode::StorageFailure, "export stream write failed");
    return snapshot.size();
}

std::size_t DocumentStore::import_json(std::istream& in) {
    std::vector<StoredRecord> incoming;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            incoming.push_back(record_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            fail(ErrorCode::ParseError, "import line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    std::unique_lock lock(mutex_);
    for (const auto& r : incoming) {
        if (records_.count({r.kind, r.key})) {
            fail(ErrorCode::StaleVersion, "import would overwrite " + std::string(to_string(r.kind)) + " " + r.key);
        }
    }
    for (auto& r : incoming) {
        append_journal(r);
        records_[{r.kind, r.key}] = std::move(r);
    }
    return incoming.size();
}

}  // namespace tai
