#include "toneforge/annotation.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "toneforge/errors.hpp"
#include "toneforge/text.hpp"

namespace toneforge {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string_view to_string(TaskStatus s) { return s == TaskStatus::scored ? "scored" : "pending"; }

std::vector<std::string> read_lines(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw StorageError("cannot read " + file.string());
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

void write_atomically(const fs::path& file, const std::string& body) {
    const fs::path tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StorageError("cannot write " + tmp.string());
        out << body;
        if (!out.flush()) throw StorageError("short write to " + tmp.string());
    }
    fs::rename(tmp, file);
}

// Uniform in [0, bound) by rejection, independent of the standard library's
// distribution implementations.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    for (;;) {
        const std::uint64_t v = rng();
        if (v < limit) return v % bound;
    }
}

}  // namespace

std::string make_task_id(std::string_view table_name, Timestamp snapshot_time, RecordId id) {
    return std::string(table_name) + "-" + format_basic(snapshot_time) + "-" + std::to_string(id);
}

std::optional<TaskIdParts> parse_task_id(std::string_view task_id) {
    const std::size_t id_dash = task_id.rfind('-');
    if (id_dash == std::string_view::npos || id_dash < 17) return std::nullopt;
    const std::string_view id_part = task_id.substr(id_dash + 1);
    TaskIdParts out;
    auto [ptr, ec] = std::from_chars(id_part.data(), id_part.data() + id_part.size(), out.record_id);
    if (ec != std::errc{} || ptr != id_part.data() + id_part.size() || out.record_id < 1) return std::nullopt;
    if (task_id[id_dash - 17] != '-') return std::nullopt;
    auto t = parse_basic(task_id.substr(id_dash - 16, 16));
    if (!t) return std::nullopt;
    out.snapshot_time = *t;
    out.table_name = std::string(task_id.substr(0, id_dash - 17));
    if (!valid_table_name(out.table_name)) return std::nullopt;
    return out;
}

std::string task_to_json(const AnnotationTask& task) {
    json doc = {
        {"task_id", task.task_id},         {"record_id", task.record_id},
        {"tone", to_string(task.tone)},    {"source_text", task.source_text},
        {"rewrite_text", task.rewrite_text}, {"status", to_string(task.status)},
    };
    return doc.dump();
}

AnnotationTask task_from_json(std::string_view line) {
    const json doc = json::parse(line);
    AnnotationTask task;
    task.task_id = doc.at("task_id").get<std::string>();
    task.record_id = doc.at("record_id").get<RecordId>();
    task.tone = parse_tone(doc.at("tone").get<std::string>());
    task.source_text = doc.at("source_text").get<std::string>();
    task.rewrite_text = doc.at("rewrite_text").get<std::string>();
    const std::string status = doc.value("status", "pending");
    if (status != "pending" && status != "scored") throw InvariantError("bad task status '" + status + "'");
    task.status = status == "scored" ? TaskStatus::scored : TaskStatus::pending;
    if (task.rewrite_text.empty()) throw InvariantError("task " + task.task_id + " has an empty rewrite");
    return task;
}

std::string submission_to_json(const ScoreSubmission& s) {
    return json{{"task_id", s.task_id},
                {"value", s.score.value},
                {"annotator_id", s.score.annotator_id},
                {"scored_at", format_extended(s.score.scored_at)}}
        .dump();
}

ScoreSubmission submission_from_json(std::string_view line) {
    json doc;
    try {
        doc = json::parse(line);
    } catch (const json::parse_error& e) {
        throw InvariantError(std::string("not JSON: ") + e.what());
    }
    if (!doc.is_object()) throw InvariantError("result line must be a JSON object");
    ScoreSubmission s;
    try {
        s.task_id = doc.at("task_id").get<std::string>();
        s.score.value = doc.at("value").get<int>();
        s.score.annotator_id = doc.at("annotator_id").get<std::string>();
        auto at = parse_extended(doc.at("scored_at").get<std::string>());
        if (!at) throw InvariantError("scored_at is not an ISO-8601 UTC timestamp");
        s.score.scored_at = *at;
    } catch (const json::exception& e) {
        throw InvariantError(std::string("result line: ") + e.what());
    }
    return s;
}

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t k, std::uint64_t seed) {
    if (k > population) throw PreconditionError("sample of " + std::to_string(k) + " exceeds population " + std::to_string(population));
    std::vector<std::size_t> pool(population);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(bounded(rng, population - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

fs::path manifest_path(const Workspace& ws, std::string_view table_name) {
    return ws.data_root() / (std::string(table_name) + ".tasks.jsonl");
}

fs::path results_path(const Workspace& ws, std::string_view table_name) {
    return ws.data_root() / (std::string(table_name) + ".results.jsonl");
}

ExportResult export_tasks(const Workspace& ws, const std::string& table_name, std::optional<std::size_t> sample,
                          std::uint64_t seed, std::optional<fs::path> out) {
    DatasetTable table;
    try {
        table = load_latest(table_name, ws.data_root());
    } catch (const SnapshotNotFound&) {
        throw OrderingError("table '" + table_name + "' does not exist");
    }
    std::vector<const ExampleRecord*> population;
    for (const ExampleRecord& r : table.records) {
        if (r.rewrite_text) population.push_back(&r);
    }
    if (population.empty()) throw OrderingError("table '" + table_name + "' has no rewrites to annotate; run inference first");

    std::vector<std::size_t> chosen;
    if (sample) {
        chosen = sample_indices(population.size(), *sample, seed);
    } else {
        chosen.resize(population.size());
        std::iota(chosen.begin(), chosen.end(), std::size_t{0});
    }

    ExportResult result;
    result.manifest = out ? *out : manifest_path(ws, table_name);
    std::string body;
    for (std::size_t i : chosen) {
        const ExampleRecord& r = *population[i];
        AnnotationTask task{make_task_id(table.name, table.snapshot_time, r.id), r.id, r.tone, r.source_text,
                            *r.rewrite_text, r.human_score ? TaskStatus::scored : TaskStatus::pending};
        body += task_to_json(task);
        body += '\n';
        result.tasks.push_back(std::move(task));
    }
    write_atomically(result.manifest, body);
    return result;
}

std::vector<AnnotationTask> read_manifest(const fs::path& file) {
    std::vector<AnnotationTask> tasks;
    std::set<std::string> ids;
    std::size_t n = 0;
    for (const std::string& line : read_lines(file)) {
        ++n;
        if (text::trim(line).empty()) continue;
        try {
            tasks.push_back(task_from_json(line));
        } catch (const std::exception& e) {
            throw InvariantError(file.string() + ":" + std::to_string(n) + ": " + e.what());
        }
        if (!ids.insert(tasks.back().task_id).second)
            throw InvariantError(file.string() + ":" + std::to_string(n) + ": duplicate task_id");
    }
    return tasks;
}

AnnotationService::AnnotationService(std::vector<AnnotationTask> tasks, std::optional<fs::path> results_log, Clock clock)
    : tasks_(std::move(tasks)), results_log_(std::move(results_log)), clock_(std::move(clock)) {
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        if (!index_.emplace(tasks_[i].task_id, i).second) throw InvariantError("duplicate task_id " + tasks_[i].task_id);
    }
    if (!results_log_) return;
    std::error_code ec;
    if (!fs::exists(*results_log_, ec)) return;
    for (const std::string& line : read_lines(*results_log_)) {
        if (text::trim(line).empty()) continue;
        ScoreSubmission s = submission_from_json(line);
        if (!index_.contains(s.task_id) || scores_.contains(s.task_id)) continue;
        scores_.emplace(s.task_id, s.score);
        order_.push_back(std::move(s));
    }
}

std::optional<TaskView> AnnotationService::next() const {
    std::lock_guard lock(mutex_);
    std::size_t scored = 0;
    const AnnotationTask* found = nullptr;
    for (const AnnotationTask& t : tasks_) {
        const bool done = t.status == TaskStatus::scored || scores_.contains(t.task_id);
        if (done) {
            ++scored;
        } else if (!found) {
            found = &t;
        }
    }
    if (!found) return std::nullopt;
    return TaskView{*found, scored + 1, tasks_.size()};
}

AnnotationService::SubmitStatus AnnotationService::submit(const std::string& task_id, int value, const std::string& annotator_id) {
    if (text::trim(annotator_id).empty()) return SubmitStatus::missing_annotator;
    if (value < 0 || value > 3) return SubmitStatus::invalid_value;
    std::lock_guard lock(mutex_);
    auto it = index_.find(task_id);
    if (it == index_.end()) return SubmitStatus::unknown_task;
    if (tasks_[it->second].status == TaskStatus::scored || scores_.contains(task_id)) return SubmitStatus::conflict;

    ScoreSubmission s{task_id, HumanScore{value, annotator_id, clock_()}};
    if (results_log_) {
        std::ofstream out(*results_log_, std::ios::binary | std::ios::app);
        out << submission_to_json(s) << '\n';
        if (!out.flush()) throw StorageError("cannot append to " + results_log_->string());
    }
    scores_.emplace(task_id, s.score);
    order_.push_back(std::move(s));
    return SubmitStatus::accepted;
}

Progress AnnotationService::progress() const {
    std::lock_guard lock(mutex_);
    Progress p;
    p.total = tasks_.size();
    for (const AnnotationTask& t : tasks_) {
        if (t.status == TaskStatus::scored || scores_.contains(t.task_id)) ++p.scored;
    }
    p.pending = p.total - p.scored;
    return p;
}

std::vector<ScoreSubmission> AnnotationService::submissions() const {
    std::lock_guard lock(mutex_);
    return order_;
}

std::optional<HumanScore> AnnotationService::score_of(const std::string& task_id) const {
    std::lock_guard lock(mutex_);
    if (auto it = scores_.find(task_id); it != scores_.end()) return it->second;
    return std::nullopt;
}

std::string_view to_string(AnnotationService::SubmitStatus status) noexcept {
    using S = AnnotationService::SubmitStatus;
    switch (status) {
        case S::accepted: return "accepted";
        case S::conflict: return "conflict";
        case S::unknown_task: return "unknown_task";
        case S::invalid_value: return "invalid_value";
        case S::missing_annotator: return "missing_annotator";
    }
    return "";
}

ImportRun import_results(const Workspace& ws, const std::string& table_name, const fs::path& results_file) {
    ImportRun run;
    try {
        run.table = load_latest(table_name, ws.data_root());
    } catch (const SnapshotNotFound&) {
        throw OrderingError("table '" + table_name + "' does not exist");
    }
    std::map<RecordId, std::size_t> position;
    for (std::size_t i = 0; i < run.table.records.size(); ++i) position.emplace(run.table.records[i].id, i);

    // Snapshots referenced by task ids, loaded lazily.
    std::map<Timestamp, std::optional<DatasetTable>> exported;
    auto exported_record = [&](const TaskIdParts& parts) -> const ExampleRecord* {
        auto [it, inserted] = exported.try_emplace(parts.snapshot_time);
        if (inserted) {
            const fs::path file = ws.data_root() / snapshot_file_name(parts.table_name, parts.snapshot_time);
            std::error_code ec;
            if (fs::exists(file, ec)) it->second = load_snapshot(file);
        }
        if (!it->second) return nullptr;
        for (const ExampleRecord& r : it->second->records) {
            if (r.id == parts.record_id) return &r;
        }
        return nullptr;
    };

    DatasetTable updated = run.table;
    std::size_t line_no = 0;
    for (const std::string& line : read_lines(results_file)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        auto error = [&](const std::string& message) { run.errors.push_back({line_no, message}); };

        ScoreSubmission s;
        try {
            s = submission_from_json(line);
        } catch (const std::exception& e) {
            error(e.what());
            continue;
        }
        if (s.score.value < 0 || s.score.value > 3) {
            error("value " + std::to_string(s.score.value) + " outside 0-3");
            continue;
        }
        auto parts = parse_task_id(s.task_id);
        if (!parts || parts->table_name != table_name) {
            error("unknown task_id '" + s.task_id + "'");
            continue;
        }
        const ExampleRecord* at_export = exported_record(*parts);
        auto pos = position.find(parts->record_id);
        if (!at_export || !at_export->rewrite_text || pos == position.end()) {
            error("unknown task_id '" + s.task_id + "'");
            continue;
        }
        ExampleRecord& r = updated.records[pos->second];
        if (r.rewrite_text != at_export->rewrite_text) {
            error("task '" + s.task_id + "': rewrite changed since export");
            continue;
        }
        if (r.human_score) {
            if (*r.human_score == s.score) {
                ++run.unchanged;
            } else {
                error("task '" + s.task_id + "' already holds a human score; first write wins");
            }
            continue;
        }
        r.human_score = s.score;
        ++run.updated;
    }

    if (run.updated == 0) return run;
    validate_table(updated);
    run.table = std::move(updated);
    run.snapshot = save_table(run.table, ws.data_root(), ws.clock);
    run.table = load_snapshot(*run.snapshot);
    return run;
}

}  // namespace toneforge
