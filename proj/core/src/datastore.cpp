#include "toneforge/datastore.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <regex>
#include <set>
#include <sstream>

#include "toneforge/csv.hpp"
#include "toneforge/errors.hpp"

namespace toneforge {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kColumnCount = std::size(kSnapshotColumns);

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};

std::optional<SnapshotRef> match_snapshot(const fs::path& file, std::string_view name) {
    const std::string fname = file.filename().string();
    // <name>-<16 char timestamp>.csv
    if (fname.size() != name.size() + 1 + 16 + 4) return std::nullopt;
    if (fname.compare(0, name.size(), name) != 0 || fname[name.size()] != '-') return std::nullopt;
    if (fname.compare(fname.size() - 4, 4, ".csv") != 0) return std::nullopt;
    auto t = parse_basic(std::string_view(fname).substr(name.size() + 1, 16));
    if (!t) return std::nullopt;
    return SnapshotRef{file, *t};
}

std::string read_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw StorageError("cannot read " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<std::string> optional_cell(std::string cell) {
    if (cell.empty()) return std::nullopt;
    return cell;
}

}  // namespace

bool valid_table_name(std::string_view name) noexcept {
    if (name.empty() || name.size() > 128) return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '.' ||
               c == '-';
    });
}

void validate_table(const DatasetTable& table) {
    if (!valid_table_name(table.name)) throw InvariantError("invalid table name '" + table.name + "'");
    if (table.schema_version != kSchemaVersion)
        throw InvariantError("unsupported schema_version " + std::to_string(table.schema_version));
    RecordId previous = 0;
    for (const ExampleRecord& r : table.records) {
        validate_record(r);
        if (r.id <= previous) throw InvariantError("record ids must be unique and ascending (id " + std::to_string(r.id) + ")");
        previous = r.id;
    }
}

std::string snapshot_file_name(std::string_view table_name, Timestamp t) {
    return std::string(table_name) + "-" + format_basic(t) + ".csv";
}

std::string serialize_table(const DatasetTable& table) {
    std::string out;
    const std::vector<std::string> header(std::begin(kSnapshotColumns), std::end(kSnapshotColumns));
    out += csv::format_row(header);
    for (const ExampleRecord& r : table.records) {
        const std::vector<std::string> row = {
            std::to_string(r.id),
            r.source_text,
            std::string(to_string(r.tone)),
            r.synth_model,
            r.rewrite_text.value_or(""),
            r.rewrite_model.value_or(""),
            r.verdict ? verdict_to_json(*r.verdict) : std::string(),
            r.human_score ? human_score_to_json(*r.human_score) : std::string(),
            format_extended(r.created_at),
        };
        out += csv::format_row(row);
    }
    return out;
}

DatasetTable parse_table(std::string_view body, std::string name, Timestamp snapshot_time,
                         const std::string& file_label) {
    csv::StrictResult parsed = csv::parse_strict(body);
    if (parsed.error) {
        const std::size_t row = parsed.rows.size();
        throw MalformedSnapshot(file_label, row, parsed.error->column,
                                parsed.error->message + " (line " + std::to_string(parsed.error->line) + ")");
    }
    if (parsed.rows.empty()) throw MalformedSnapshot(file_label, 0, MalformedSnapshot::npos, "missing header");

    const csv::Row& header = parsed.rows.front().fields;
    if (header.size() != kColumnCount) throw MalformedSnapshot(file_label, 0, MalformedSnapshot::npos, "wrong header");
    for (std::size_t c = 0; c < kColumnCount; ++c) {
        if (header[c] != kSnapshotColumns[c])
            throw MalformedSnapshot(file_label, 0, c, "expected header column '" + std::string(kSnapshotColumns[c]) + "'");
    }

    DatasetTable table;
    table.name = std::move(name);
    table.snapshot_time = snapshot_time;
    std::set<RecordId> ids;

    for (std::size_t i = 1; i < parsed.rows.size(); ++i) {
        csv::Row& f = parsed.rows[i].fields;
        auto malformed = [&](std::size_t column, const std::string& what) {
            return MalformedSnapshot(file_label, i, column, what);
        };
        if (f.size() != kColumnCount)
            throw malformed(MalformedSnapshot::npos,
                            "expected " + std::to_string(kColumnCount) + " fields, got " + std::to_string(f.size()));

        ExampleRecord r;
        auto [ptr, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), r.id);
        if (ec != std::errc{} || ptr != f[0].data() + f[0].size() || r.id < 1) throw malformed(0, "bad id '" + f[0] + "'");
        if (!ids.insert(r.id).second) throw malformed(0, "duplicate id " + f[0]);
        if (!table.records.empty() && r.id < table.records.back().id) throw malformed(0, "ids out of order");

        r.source_text = std::move(f[1]);
        auto tone = try_parse_tone(f[2]);
        if (!tone) throw malformed(2, "unknown tone '" + f[2] + "'");
        r.tone = *tone;
        r.synth_model = std::move(f[3]);
        r.rewrite_text = optional_cell(std::move(f[4]));
        r.rewrite_model = optional_cell(std::move(f[5]));
        if (!f[6].empty()) {
            try {
                r.verdict = verdict_from_json(f[6]);
            } catch (const Error& e) {
                throw malformed(6, e.what());
            }
        }
        if (!f[7].empty()) {
            try {
                r.human_score = human_score_from_json(f[7]);
            } catch (const Error& e) {
                throw malformed(7, e.what());
            }
        }
        auto created = parse_extended(f[8]);
        if (!created) throw malformed(8, "bad created_at '" + f[8] + "'");
        r.created_at = *created;

        try {
            validate_record(r);
        } catch (const InvariantError& e) {
            throw malformed(MalformedSnapshot::npos, e.what());
        }
        table.records.push_back(std::move(r));
    }
    return table;
}

std::vector<SnapshotRef> list_snapshots(std::string_view name, const fs::path& root) {
    std::vector<SnapshotRef> out;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) return out;
    for (const fs::directory_entry& entry : fs::directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        if (auto ref = match_snapshot(entry.path(), name)) out.push_back(std::move(*ref));
    }
    std::sort(out.begin(), out.end(), [](const SnapshotRef& a, const SnapshotRef& b) { return a.time < b.time; });
    return out;
}

std::vector<std::string> list_tables(const fs::path& root) {
    static const std::regex pattern(R"(^(.+)-(\d{8}T\d{6}Z)\.csv$)");
    std::set<std::string> names;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) return {};
    for (const fs::directory_entry& entry : fs::directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        const std::string fname = entry.path().filename().string();
        std::smatch m;
        if (std::regex_match(fname, m, pattern) && valid_table_name(m[1].str()) && parse_basic(m[2].str()))
            names.insert(m[1].str());
    }
    return {names.begin(), names.end()};
}

fs::path save_table(const DatasetTable& table, const fs::path& root, const Clock& clock) {
    validate_table(table);
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw StorageError("not a directory: " + root.string());

    Timestamp t = clock();
    const std::vector<SnapshotRef> existing = list_snapshots(table.name, root);
    if (!existing.empty() && existing.back().time >= t) t = existing.back().time + std::chrono::seconds(1);

    const std::string body = serialize_table(table);
    for (int attempt = 0; attempt < 2; ++attempt, t += std::chrono::seconds(1)) {
        const fs::path file = root / snapshot_file_name(table.name, t);
        std::unique_ptr<std::FILE, FileCloser> out(std::fopen(file.c_str(), "wbx"));
        if (!out) {
            if (errno == EEXIST) continue;
            throw StorageError("cannot create " + file.string() + ": " + std::strerror(errno));
        }
        if (std::fwrite(body.data(), 1, body.size(), out.get()) != body.size() || std::fflush(out.get()) != 0)
            throw StorageError("short write to " + file.string());
        return file;
    }
    throw StorageError("snapshot timestamp collision for table '" + table.name + "'");
}

DatasetTable load_snapshot(const fs::path& file) {
    const std::string fname = file.filename().string();
    static const std::regex pattern(R"(^(.+)-(\d{8}T\d{6}Z)\.csv$)");
    std::smatch m;
    if (!std::regex_match(fname, m, pattern)) throw StorageError("not a snapshot file name: " + fname);
    auto t = parse_basic(m[2].str());
    if (!t) throw StorageError("bad snapshot timestamp in " + fname);
    return parse_table(read_file(file), m[1].str(), *t, file.string());
}

DatasetTable load_latest(std::string_view name, const fs::path& root) {
    const std::vector<SnapshotRef> snapshots = list_snapshots(name, root);
    if (snapshots.empty())
        throw SnapshotNotFound("no snapshot of table '" + std::string(name) + "' under " + root.string());
    return load_snapshot(snapshots.back().path);
}

DatasetTable upsert_column(const DatasetTable& table, const RecordSelector& selector, const RecordUpdater& updater) {
    DatasetTable out = table;
    for (ExampleRecord& r : out.records) {
        if (!selector(r)) continue;
        const RecordId id = r.id;
        const Timestamp created = r.created_at;
        updater(r);
        if (r.id != id || r.created_at != created)
            throw InvariantError("updater changed id or created_at of record " + std::to_string(id));
        validate_record(r);
    }
    return out;
}

RecordId max_id(const DatasetTable& table) noexcept {
    RecordId m = 0;
    for (const ExampleRecord& r : table.records) m = std::max(m, r.id);
    return m;
}

}  // namespace toneforge
