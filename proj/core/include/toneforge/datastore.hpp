#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "toneforge/record.hpp"
#include "toneforge/timestamp.hpp"

namespace toneforge {

inline constexpr int kSchemaVersion = 1;

// Header columns of every snapshot file, in order.
inline constexpr std::string_view kSnapshotColumns[] = {
    "id", "source_text", "tone", "synth_model", "rewrite_text",
    "rewrite_model", "verdict_json", "human_score", "created_at",
};

struct DatasetTable {
    std::string name;
    std::vector<ExampleRecord> records;  // sorted by id
    Timestamp snapshot_time{};
    int schema_version = kSchemaVersion;

    bool operator==(const DatasetTable&) const = default;
};

// Table names become file-name prefixes: [A-Za-z0-9_.-]+.
bool valid_table_name(std::string_view name) noexcept;

// Checks table-level invariants (name, schema version, sorted unique ids) and
// every record. Throws InvariantError.
void validate_table(const DatasetTable& table);

std::string snapshot_file_name(std::string_view table_name, Timestamp t);

// Serialized file body (header plus rows).
std::string serialize_table(const DatasetTable& table);

// Strict parse of a snapshot body. name/snapshot_time are taken from the
// arguments. Throws MalformedSnapshot naming the row and column at fault.
DatasetTable parse_table(std::string_view body, std::string name, Timestamp snapshot_time,
                         const std::string& file_label = "<memory>");

struct SnapshotRef {
    std::filesystem::path path;
    Timestamp time{};
};

// All snapshots of `name` under root, oldest first.
std::vector<SnapshotRef> list_snapshots(std::string_view name, const std::filesystem::path& root);

// Table names that have at least one snapshot under root, sorted.
std::vector<std::string> list_tables(const std::filesystem::path& root);

// Writes a fresh snapshot and returns its path. The timestamp is clock() or
// one second past the newest existing snapshot of the same name, whichever is
// later; an existing file is never overwritten (one retry at +1s on
// collision, then StorageError).
std::filesystem::path save_table(const DatasetTable& table, const std::filesystem::path& root,
                                 const Clock& clock = system_now);

// The snapshot with the greatest timestamp. Throws SnapshotNotFound or
// MalformedSnapshot.
DatasetTable load_latest(std::string_view name, const std::filesystem::path& root);
DatasetTable load_snapshot(const std::filesystem::path& file);

using RecordSelector = std::function<bool(const ExampleRecord&)>;
using RecordUpdater = std::function<void(ExampleRecord&)>;

// Returns a copy of `table` with updater applied to every selected record.
// Rejects the whole update (InvariantError, input untouched) if any updated
// record breaks an invariant or has its id/created_at changed.
DatasetTable upsert_column(const DatasetTable& table, const RecordSelector& selector,
                           const RecordUpdater& updater);

RecordId max_id(const DatasetTable& table) noexcept;

}  // namespace toneforge
