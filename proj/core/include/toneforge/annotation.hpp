#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "toneforge/datastore.hpp"
#include "toneforge/record.hpp"
#include "toneforge/workspace.hpp"

namespace toneforge {

enum class TaskStatus { pending, scored };

// One unit of human judgment. Carries no machine scores.
struct AnnotationTask {
    std::string task_id;  // <table>-<snapshot timestamp>-<record id>
    RecordId record_id = 0;
    Tone tone = Tone::professional;
    std::string source_text;
    std::string rewrite_text;
    TaskStatus status = TaskStatus::pending;

    bool operator==(const AnnotationTask&) const = default;
};

std::string make_task_id(std::string_view table_name, Timestamp snapshot_time, RecordId id);

struct TaskIdParts {
    std::string table_name;
    Timestamp snapshot_time{};
    RecordId record_id = 0;
};
std::optional<TaskIdParts> parse_task_id(std::string_view task_id);

std::string task_to_json(const AnnotationTask& task);
AnnotationTask task_from_json(std::string_view line);

// One line of the results file.
struct ScoreSubmission {
    std::string task_id;
    HumanScore score;

    bool operator==(const ScoreSubmission&) const = default;
};
std::string submission_to_json(const ScoreSubmission& submission);
ScoreSubmission submission_from_json(std::string_view line);

// k distinct indices out of [0, population), uniformly, in increasing order.
// Reproducible from seed on every platform.
std::vector<std::size_t> sample_indices(std::size_t population, std::size_t k, std::uint64_t seed);

// Default locations under data_root.
std::filesystem::path manifest_path(const Workspace& ws, std::string_view table_name);
std::filesystem::path results_path(const Workspace& ws, std::string_view table_name);

struct ExportResult {
    std::filesystem::path manifest;
    std::vector<AnnotationTask> tasks;
};

// Writes one JSON task per line for rewritten records (optionally a seeded
// sample of them), ordered by record id. Throws PreconditionError when
// sample exceeds the population.
ExportResult export_tasks(const Workspace& ws, const std::string& table_name,
                          std::optional<std::size_t> sample, std::uint64_t seed,
                          std::optional<std::filesystem::path> out = {});

std::vector<AnnotationTask> read_manifest(const std::filesystem::path& file);

struct TaskView {
    AnnotationTask task;
    std::size_t position = 0;  // 1-based
    std::size_t total = 0;
};

struct Progress {
    std::size_t scored = 0;
    std::size_t pending = 0;
    std::size_t total = 0;
};

// In-memory annotation state, thread-safe. Accepted scores are appended to
// the results log when one is attached; prior log entries are replayed on
// construction. First write per task wins.
class AnnotationService {
public:
    enum class SubmitStatus { accepted, conflict, unknown_task, invalid_value, missing_annotator };

    AnnotationService(std::vector<AnnotationTask> tasks, std::optional<std::filesystem::path> results_log = {},
                      Clock clock = system_now);

    std::optional<TaskView> next() const;
    SubmitStatus submit(const std::string& task_id, int value, const std::string& annotator_id);
    Progress progress() const;
    std::vector<ScoreSubmission> submissions() const;
    std::optional<HumanScore> score_of(const std::string& task_id) const;

private:
    mutable std::mutex mutex_;
    std::vector<AnnotationTask> tasks_;
    std::map<std::string, std::size_t> index_;
    std::map<std::string, HumanScore> scores_;
    std::vector<ScoreSubmission> order_;
    std::optional<std::filesystem::path> results_log_;
    Clock clock_;
};

std::string_view to_string(AnnotationService::SubmitStatus status) noexcept;

struct ImportError {
    std::size_t line = 0;
    std::string message;
};

struct ImportRun {
    DatasetTable table;
    std::optional<std::filesystem::path> snapshot;
    std::size_t updated = 0;
    std::size_t unchanged = 0;
    std::vector<ImportError> errors;
};

// Applies a results file to table_name. Rows naming unknown tasks (or tasks
// whose record/rewrite no longer matches) are reported and skipped. A score
// already present from an earlier import is kept.
ImportRun import_results(const Workspace& ws, const std::string& table_name,
                         const std::filesystem::path& results_file);

}  // namespace toneforge
