#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"
#include "toneforge/annotation.hpp"
#include "toneforge/errors.hpp"

using namespace toneforge;

namespace {

// 50 rewritten records plus two without a rewrite.
DatasetTable seeded_table() {
    std::vector<ExampleRecord> records;
    for (RecordId id = 1; id <= 50; ++id) {
        records.push_back(tfx::rewritten(tfx::make_record(id, kAllTones[id % 9], "source " + std::to_string(id)),
                                         "rewrite " + std::to_string(id)));
    }
    records.push_back(tfx::make_record(51, Tone::witty, "untouched"));
    records.push_back(tfx::make_record(52, Tone::casual, "untouched too"));
    return tfx::make_table("eval", std::move(records));
}

Workspace seeded_ws(const tfx::TempDir& dir) {
    Workspace ws = tfx::make_workspace(dir, {});
    save_table(seeded_table(), ws.data_root(), ws.clock);
    return ws;
}

std::string result_line(const std::string& task_id, int value, const std::string& who = "ann") {
    return submission_to_json({task_id, HumanScore{value, who, tfx::at(2025, 3, 1, 12)}});
}

}  // namespace

TEST(TaskId, RoundTripsWithDashedTableNames) {
    const Timestamp t = tfx::at(2025, 6, 7, 8, 9, 10);
    const std::string id = make_task_id("my-table.v2", t, 6520);
    EXPECT_EQ(id, "my-table.v2-20250607T080910Z-6520");
    const auto parts = parse_task_id(id);
    ASSERT_TRUE(parts);
    EXPECT_EQ(parts->table_name, "my-table.v2");
    EXPECT_EQ(parts->snapshot_time, t);
    EXPECT_EQ(parts->record_id, 6520);
}

TEST(TaskId, RejectsMalformed) {
    EXPECT_FALSE(parse_task_id(""));
    EXPECT_FALSE(parse_task_id("eval-6520"));
    EXPECT_FALSE(parse_task_id("eval-2025-6520"));
    EXPECT_FALSE(parse_task_id("eval-20250607T080910Z-x"));
    EXPECT_FALSE(parse_task_id("-20250607T080910Z-1"));
}

TEST(TaskJson, RoundTrip) {
    AnnotationTask task{"eval-20250101T000000Z-3", 3, Tone::emojify, "line one\n\"two\"", "rw \xF0\x9F\x98\x80",
                        TaskStatus::pending};
    EXPECT_EQ(task_from_json(task_to_json(task)), task);
    const ScoreSubmission s{"eval-20250101T000000Z-3", HumanScore{2, "ada", tfx::at(2025, 1, 2)}};
    EXPECT_EQ(submission_from_json(submission_to_json(s)), s);
}

TEST(SampleIndices, DistinctSortedAndReproducible) {
    const auto a = sample_indices(50, 10, 7);
    EXPECT_EQ(a, sample_indices(50, 10, 7));
    EXPECT_EQ(a.size(), 10u);
    EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
    EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 10u);
    for (std::size_t i : a) EXPECT_LT(i, 50u);
    EXPECT_NE(a, sample_indices(50, 10, 8));
    EXPECT_EQ(sample_indices(5, 5, 1), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
    EXPECT_THROW(sample_indices(5, 6, 1), PreconditionError);
}

TEST(SampleIndices, EveryIndexReachable) {
    std::set<std::size_t> seen;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        for (std::size_t i : sample_indices(20, 3, seed)) seen.insert(i);
    }
    EXPECT_EQ(seen.size(), 20u);
}

TEST(Export, SeededSampleIsByteIdentical) {
    tfx::TempDir dir;
    const Workspace ws = seeded_ws(dir);
    const auto first = export_tasks(ws, "eval", 10, 7, dir / "a.jsonl");
    const auto second = export_tasks(ws, "eval", 10, 7, dir / "b.jsonl");
    EXPECT_EQ(first.tasks.size(), 10u);
    EXPECT_EQ(tfx::read_file(first.manifest), tfx::read_file(second.manifest));
    EXPECT_EQ(read_manifest(first.manifest), first.tasks);
    EXPECT_TRUE(std::is_sorted(first.tasks.begin(), first.tasks.end(),
                               [](const auto& a, const auto& b) { return a.record_id < b.record_id; }));
}

TEST(Export, WithoutSampleTakesEveryRewrite) {
    tfx::TempDir dir;
    const Workspace ws = seeded_ws(dir);
    const auto run = export_tasks(ws, "eval", std::nullopt, 0);
    EXPECT_EQ(run.manifest, manifest_path(ws, "eval"));
    ASSERT_EQ(run.tasks.size(), 50u);
    EXPECT_EQ(run.tasks.front().source_text, "source 1");
    EXPECT_EQ(run.tasks.front().rewrite_text, "rewrite 1");
    EXPECT_EQ(run.tasks.back().record_id, 50);
}

TEST(Export, OversizedSampleFails) {
    tfx::TempDir dir;
    const Workspace ws = seeded_ws(dir);
    EXPECT_THROW(export_tasks(ws, "eval", 60, 7), PreconditionError);
    EXPECT_FALSE(std::filesystem::exists(manifest_path(ws, "eval")));
}

TEST(Export, MissingTableOrNoRewrites) {
    tfx::TempDir dir;
    Workspace ws = tfx::make_workspace(dir, {});
    EXPECT_THROW(export_tasks(ws, "nope", std::nullopt, 0), OrderingError);
    save_table(tfx::make_table("raw", {tfx::make_record(1, Tone::witty, "x")}), ws.data_root(), ws.clock);
    EXPECT_THROW(export_tasks(ws, "raw", std::nullopt, 0), OrderingError);
}

TEST(Export, ManifestIsBlindToVerdicts) {
    tfx::TempDir dir;
    Workspace ws = tfx::make_workspace(dir, {});
    DatasetTable t = seeded_table();
    for (ExampleRecord& r : t.records) {
        if (r.rewrite_text) r.verdict = make_verdict({3, 2, 3, 1}, true, "judge-model");
    }
    save_table(t, ws.data_root(), ws.clock);
    const std::string body = tfx::read_file(export_tasks(ws, "eval", std::nullopt, 0).manifest);
    for (const char* leak : {"verdict", "normalized", "mean_grade", "judge", "accuracy", "is_rewrite", "grade"}) {
        EXPECT_EQ(body.find(leak), std::string::npos) << leak;
    }
}

TEST(AnnotationService, WalksTasksAndEnforcesFirstWrite) {
    tfx::TempDir dir;
    const Workspace ws = seeded_ws(dir);
    AnnotationService service(export_tasks(ws, "eval", 3, 1).tasks, std::nullopt, tfx::ticking_clock(tfx::at(2025, 5, 5)));
    EXPECT_EQ(service.progress().total, 3u);
    auto view = service.next();
    ASSERT_TRUE(view);
    EXPECT_EQ(view->position, 1u);
    EXPECT_EQ(view->total, 3u);
    const std::string id = view->task.task_id;

    using S = AnnotationService::SubmitStatus;
    EXPECT_EQ(service.submit(id, 4, "ada"), S::invalid_value);
    EXPECT_EQ(service.submit(id, -1, "ada"), S::invalid_value);
    EXPECT_EQ(service.submit(id, 2, ""), S::missing_annotator);
    EXPECT_EQ(service.submit("eval-20250101T000000Z-999", 2, "ada"), S::unknown_task);
    EXPECT_EQ(service.submit(id, 2, "ada"), S::accepted);
    EXPECT_EQ(service.submit(id, 3, "bob"), S::conflict);
    EXPECT_EQ(service.score_of(id)->value, 2);
    EXPECT_EQ(service.score_of(id)->annotator_id, "ada");

    const Progress p = service.progress();
    EXPECT_EQ(p.scored, 1u);
    EXPECT_EQ(p.pending, 2u);
    view = service.next();
    ASSERT_TRUE(view);
    EXPECT_NE(view->task.task_id, id);
    EXPECT_EQ(view->position, 2u);

    EXPECT_EQ(service.submit(service.next()->task.task_id, 0, "ada"), S::accepted);
    EXPECT_EQ(service.submit(service.next()->task.task_id, 3, "ada"), S::accepted);
    EXPECT_FALSE(service.next());
    EXPECT_EQ(service.progress().pending, 0u);
}

TEST(AnnotationService, ResultsLogIsReplayed) {
    tfx::TempDir dir;
    const Workspace ws = seeded_ws(dir);
    const auto tasks = export_tasks(ws, "eval", 4, 3).tasks;
    const auto log = dir / "results.jsonl";
    {
        AnnotationService service(tasks, log);
        ASSERT_EQ(service.submit(tasks[0].task_id, 1, "ada"), AnnotationService::SubmitStatus::accepted);
        ASSERT_EQ(service.submit(tasks[1].task_id, 3, "ada"), AnnotationService::SubmitStatus::accepted);
    }
    AnnotationService resumed(tasks, log);
    EXPECT_EQ(resumed.progress().scored, 2u);
    EXPECT_EQ(resumed.submit(tasks[0].task_id, 2, "bob"), AnnotationService::SubmitStatus::conflict);
    EXPECT_EQ(resumed.next()->task.task_id, tasks[2].task_id);
    EXPECT_EQ(resumed.submissions().size(), 2u);
}

TEST(Import, ValidRowsFillScoresAndUnknownRowsAreReported) {
    tfx::TempDir dir;
    const Workspace ws = seeded_ws(dir);
    const auto tasks = export_tasks(ws, "eval", 10, 7).tasks;
    std::string body;
    for (std::size_t i = 0; i < 9; ++i) body += result_line(tasks[i].task_id, static_cast<int>(i % 4)) + "\n";
    body += result_line("eval-20250101T000000Z-777", 2) + "\n";
    tfx::write_file(dir / "r.jsonl", body);

    const ImportRun run = import_results(ws, "eval", dir / "r.jsonl");
    EXPECT_EQ(run.updated, 9u);
    ASSERT_EQ(run.errors.size(), 1u);
    EXPECT_EQ(run.errors[0].line, 10u);
    ASSERT_TRUE(run.snapshot);

    const DatasetTable latest = load_latest("eval", ws.data_root());
    std::size_t scored = 0;
    for (const ExampleRecord& r : latest.records) scored += r.human_score ? 1 : 0;
    EXPECT_EQ(scored, 9u);

    const ImportRun again = import_results(ws, "eval", dir / "r.jsonl");
    EXPECT_EQ(again.updated, 0u);
    EXPECT_EQ(again.unchanged, 9u);
    EXPECT_FALSE(again.snapshot);
    EXPECT_EQ(list_snapshots("eval", ws.data_root()).size(), 2u);
}

TEST(Import, FirstWriteWinsAcrossImports) {
    tfx::TempDir dir;
    const Workspace ws = seeded_ws(dir);
    const auto tasks = export_tasks(ws, "eval", 1, 7).tasks;
    tfx::write_file(dir / "a.jsonl", result_line(tasks[0].task_id, 1) + "\n");
    tfx::write_file(dir / "b.jsonl", result_line(tasks[0].task_id, 3) + "\n");
    EXPECT_EQ(import_results(ws, "eval", dir / "a.jsonl").updated, 1u);
    const ImportRun second = import_results(ws, "eval", dir / "b.jsonl");
    EXPECT_EQ(second.updated, 0u);
    EXPECT_EQ(second.errors.size(), 1u);
    const DatasetTable latest = load_latest("eval", ws.data_root());
    for (const ExampleRecord& r : latest.records) {
        if (r.id == tasks[0].record_id) {
            EXPECT_EQ(r.human_score->value, 1);
        }
    }
}

TEST(Import, ChangedRewriteIsRejected) {
    tfx::TempDir dir;
    Workspace ws = seeded_ws(dir);
    const auto tasks = export_tasks(ws, "eval", 1, 7).tasks;
    DatasetTable t = load_latest("eval", ws.data_root());
    for (ExampleRecord& r : t.records) {
        if (r.id == tasks[0].record_id) r.rewrite_text = "a newer rewrite";
    }
    save_table(t, ws.data_root(), ws.clock);
    tfx::write_file(dir / "r.jsonl", result_line(tasks[0].task_id, 2) + "\n");
    const ImportRun run = import_results(ws, "eval", dir / "r.jsonl");
    EXPECT_EQ(run.updated, 0u);
    ASSERT_EQ(run.errors.size(), 1u);
    EXPECT_NE(run.errors[0].message.find("changed"), std::string::npos);
}

TEST(Import, MalformedAndOutOfRangeLines) {
    tfx::TempDir dir;
    const Workspace ws = seeded_ws(dir);
    const auto tasks = export_tasks(ws, "eval", 2, 7).tasks;
    tfx::write_file(dir / "r.jsonl", "not json\n\n" + result_line(tasks[0].task_id, 7) + "\n" +
                                         result_line(tasks[1].task_id, 0) + "\n");
    const ImportRun run = import_results(ws, "eval", dir / "r.jsonl");
    EXPECT_EQ(run.updated, 1u);
    ASSERT_EQ(run.errors.size(), 2u);
    EXPECT_EQ(run.errors[0].line, 1u);
    EXPECT_EQ(run.errors[1].line, 3u);
}
