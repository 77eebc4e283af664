#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tai/time.hpp"

namespace tai {

enum class RecordKind { WorkItem, MetricsEvent, SurveyResponse };

std::string_view to_string(RecordKind kind);
RecordKind record_kind_from_string(std::string_view text);

struct StoredRecord {
    RecordKind kind = RecordKind::WorkItem;
    std::string key;
    std::int64_t version = 0;
    nlohmann::json payload;

    bool operator==(const StoredRecord&) const = default;
};

// Export filter; every present field must match. Fields are read from the
// payload: course_id from "course_id", state from "state", time from "at" or
// else "created_at" (top level, then under "post"). A record lacking a field
// that the filter asks for does not match.
struct ExportFilter {
    std::optional<std::string> course_id;
    std::optional<RecordKind> kind;
    std::optional<std::string> state;
    std::optional<Timestamp> from;  // inclusive
    std::optional<Timestamp> to;    // exclusive

    bool matches(const StoredRecord& record) const;
};

// Document store with per-key compare-and-swap. With a journal path, every
// accepted save is appended to the journal (one JSON document per line) and
// the journal is replayed on open; without one the store is memory only.
class DocumentStore {
public:
    DocumentStore() = default;
    explicit DocumentStore(std::filesystem::path journal);

    DocumentStore(const DocumentStore&) = delete;
    DocumentStore& operator=(const DocumentStore&) = delete;

    // Stores `payload` under (kind, key) if the current version equals
    // expected_version (0 when absent). Returns the new version. Throws
    // StaleVersion or StorageFailure.
    std::int64_t save(RecordKind kind, const std::string& key, nlohmann::json payload, std::int64_t expected_version);

    std::optional<StoredRecord> get(RecordKind kind, const std::string& key) const;

    // Snapshot ordered by (kind, key).
    std::vector<StoredRecord> scan(std::optional<RecordKind> kind = std::nullopt) const;
    std::size_t size() const;

    // Secrets are replaced by "[REDACTED]" in every exported string value.
    void add_secret(std::string secret);

    // One compact JSON document per line, ordered by (kind, key):
    // {"key":..,"kind":..,"payload":{..},"version":..}. Returns lines written.
    std::size_t export_json(std::ostream& out, const ExportFilter& filter = {}) const;

    // Loads exported lines verbatim (versions preserved). Throws ParseError
    // with the line number, or StaleVersion if a key already exists.
    std::size_t import_json(std::istream& in);

    static std::string export_line(const StoredRecord& record, const std::vector<std::string>& secrets = {});

private:
    using Key = std::pair<RecordKind, std::string>;

    void append_journal(const StoredRecord& record);

    mutable std::shared_mutex mutex_;
    std::map<Key, StoredRecord> records_;
    std::vector<std::string> secrets_;
    std::optional<std::filesystem::path> journal_path_;
    std::ofstream journal_;
};

}  // namespace tai
