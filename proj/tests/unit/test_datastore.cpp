#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "toneforge/datastore.hpp"
#include "toneforge/errors.hpp"

using namespace toneforge;
using tfx::at;
namespace fs = std::filesystem;

namespace {

Clock fixed(Timestamp t) {
    return [t] { return t; };
}

DatasetTable sample_table() {
    ExampleRecord a = tfx::make_record(1, Tone::professional, "I was feelin' myself in that outfit, bruh, no lie.");
    ExampleRecord b = tfx::rewritten(tfx::make_record(2, Tone::emojify, "Commas, \"quotes\"\nand newlines"),
                                     "Commas 🎉, \"quotes\"\r\nand newlines 🌊", "cand-x");
    b.verdict = make_verdict({3, 2, 3, 1}, true, "judge-y");
    b.verdict->aspects[1].rationale = "Dropped \"and\", see [2]";
    b.human_score = HumanScore{3, "ann", at(2025, 2, 2, 2, 2, 2)};
    ExampleRecord c = tfx::rewritten(tfx::make_record(5, Tone::keypoints, "Ünïcödé ✓"), "- point", "cand-x");
    return tfx::make_table("tones", {a, b, c});
}

}  // namespace

TEST(Datastore, SnapshotNamingRule) {
    tfx::TempDir dir;
    const fs::path p = save_table(sample_table(), dir.path(), fixed(at(2025, 1, 2, 3, 4, 5)));
    EXPECT_EQ(p.filename().string(), "tones-20250102T030405Z.csv");
    EXPECT_TRUE(fs::exists(p));
}

TEST(Datastore, SecondSaveInSameSecondGetsLaterTimestamp) {
    tfx::TempDir dir;
    const auto clock = fixed(at(2025, 1, 2, 3, 4, 5));
    const fs::path first = save_table(sample_table(), dir.path(), clock);
    const std::string first_body = tfx::read_file(first);
    const fs::path second = save_table(sample_table(), dir.path(), clock);
    EXPECT_NE(first, second);
    EXPECT_EQ(second.filename().string(), "tones-20250102T030406Z.csv");
    EXPECT_EQ(tfx::read_file(first), first_body);  // prior snapshot untouched
    const auto snaps = list_snapshots("tones", dir.path());
    ASSERT_EQ(snaps.size(), 2u);
    EXPECT_LT(snaps[0].time, snaps[1].time);
}

TEST(Datastore, ClockGoingBackwardsStillIncreases) {
    tfx::TempDir dir;
    save_table(sample_table(), dir.path(), fixed(at(2025, 6, 1)));
    const fs::path p = save_table(sample_table(), dir.path(), fixed(at(2025, 1, 1)));
    EXPECT_EQ(p.filename().string(), "tones-20250601T000001Z.csv");
}

TEST(Datastore, SaveThenLoadRoundTrips) {
    tfx::TempDir dir;
    const DatasetTable t = sample_table();
    const fs::path p = save_table(t, dir.path(), fixed(at(2025, 1, 2, 3, 4, 5)));
    DatasetTable loaded = load_latest("tones", dir.path());
    EXPECT_EQ(loaded.snapshot_time, at(2025, 1, 2, 3, 4, 5));
    EXPECT_EQ(loaded.records, t.records);
    EXPECT_EQ(load_snapshot(p), loaded);
}

TEST(Datastore, LoadLatestPicksGreatestTimestamp) {
    tfx::TempDir dir;
    DatasetTable older = sample_table();
    older.records.pop_back();
    save_table(older, dir.path(), fixed(at(2025, 1, 1)));
    save_table(sample_table(), dir.path(), fixed(at(2025, 1, 2)));
    const DatasetTable loaded = load_latest("tones", dir.path());
    EXPECT_EQ(loaded.snapshot_time, at(2025, 1, 2));
    EXPECT_EQ(loaded.records.size(), 3u);
}

TEST(Datastore, OtherTablesDoNotInterfere) {
    tfx::TempDir dir;
    save_table(sample_table(), dir.path(), fixed(at(2025, 1, 1)));
    DatasetTable other = sample_table();
    other.name = "tones__small";
    save_table(other, dir.path(), fixed(at(2025, 5, 1)));
    EXPECT_EQ(load_latest("tones", dir.path()).snapshot_time, at(2025, 1, 1));
    EXPECT_EQ(list_tables(dir.path()), (std::vector<std::string>{"tones", "tones__small"}));
}

TEST(Datastore, EmptyDirectoryHasNoSnapshot) {
    tfx::TempDir dir;
    EXPECT_THROW(load_latest("tones", dir.path()), SnapshotNotFound);
    EXPECT_THROW(load_latest("tones", dir.path() / "missing"), SnapshotNotFound);
}

TEST(Datastore, DuplicateIdIsMalformedNamingTheRow) {
    tfx::TempDir dir;
    std::string body = serialize_table(sample_table());
    // Rewrite the id of the third data row to collide with the second.
    const std::size_t pos = body.rfind("\n5,");
    ASSERT_NE(pos, std::string::npos);
    body.replace(pos, 3, "\n2,");
    tfx::write_file(dir / "tones-20250101T000000Z.csv", body);
    try {
        load_latest("tones", dir.path());
        FAIL() << "expected MalformedSnapshot";
    } catch (const MalformedSnapshot& e) {
        EXPECT_EQ(e.row(), 3u);
        EXPECT_EQ(e.column(), 0u);
        EXPECT_NE(std::string(e.what()).find("duplicate id"), std::string::npos);
    }
}

TEST(Datastore, MalformedCellsReportColumn) {
    const std::string header = "id,source_text,tone,synth_model,rewrite_text,rewrite_model,verdict_json,human_score,created_at\n";
    auto column_of = [&](const std::string& row) -> std::size_t {
        try {
            parse_table(header + row, "t", at(2025, 1, 1));
        } catch (const MalformedSnapshot& e) {
            EXPECT_EQ(e.row(), 1u);
            return e.column();
        }
        return 999;
    };
    EXPECT_EQ(column_of("x,hi,witty,g,,,,,2025-01-01T00:00:00Z\n"), 0u);
    EXPECT_EQ(column_of("1,hi,sarcastic,g,,,,,2025-01-01T00:00:00Z\n"), 2u);
    EXPECT_EQ(column_of("1,hi,witty,g,,m,,,2025-01-01T00:00:00Z\n"), MalformedSnapshot::npos);
    EXPECT_EQ(column_of("1,hi,witty,g,r,m,{bad,,2025-01-01T00:00:00Z\n"), 6u);
    EXPECT_EQ(column_of("1,hi,witty,g,,,,,yesterday\n"), 8u);
    EXPECT_EQ(column_of("1,hi,witty,g,,,,\n"), MalformedSnapshot::npos);
}

TEST(Datastore, HeaderMustMatch) {
    EXPECT_THROW(parse_table("id,text\n", "t", at(2025, 1, 1)), MalformedSnapshot);
}

TEST(Datastore, OptionalFieldsSerializeAsEmptyCells) {
    DatasetTable t = tfx::make_table("tones", {tfx::make_record(1, Tone::casual, "hello")});
    const std::string body = serialize_table(t);
    EXPECT_NE(body.find("\n1,hello,casual,gen-model,,,,,2025-01-01T00:00:00Z\n"), std::string::npos);
}

TEST(Datastore, UpsertColumnCountsModifications) {
    std::vector<ExampleRecord> records;
    for (int i = 1; i <= 10; ++i) records.push_back(tfx::make_record(i, Tone::witty, "s" + std::to_string(i)));
    const DatasetTable t = tfx::make_table("tones", records);
    const DatasetTable out = upsert_column(
        t, [](const ExampleRecord& r) { return r.id % 3 == 0; },
        [](ExampleRecord& r) {
            r.rewrite_text = "rw";
            r.rewrite_model = "m";
        });
    ASSERT_EQ(out.records.size(), 10u);
    int modified = 0;
    for (std::size_t i = 0; i < 10; ++i) modified += out.records[i] != t.records[i];
    EXPECT_EQ(modified, 3);
}

TEST(Datastore, UpsertColumnRejectsAtomically) {
    std::vector<ExampleRecord> records;
    for (int i = 1; i <= 4; ++i) records.push_back(tfx::make_record(i, Tone::witty, "s"));
    const DatasetTable t = tfx::make_table("tones", records);
    const DatasetTable copy = t;
    EXPECT_THROW(upsert_column(t, [](const ExampleRecord&) { return true; },
                               [](ExampleRecord& r) { r.rewrite_model = "m"; }),
                 InvariantError);
    EXPECT_EQ(t, copy);
    EXPECT_THROW(upsert_column(t, [](const ExampleRecord& r) { return r.id == 2; },
                               [](ExampleRecord& r) { r.id = 9; }),
                 InvariantError);
}

TEST(Datastore, UpsertIdentityIsNoop) {
    const DatasetTable t = sample_table();
    EXPECT_EQ(upsert_column(t, [](const ExampleRecord&) { return true; }, [](ExampleRecord&) {}), t);
}

TEST(Datastore, ValidateTableRequiresSortedUniqueIds) {
    DatasetTable t = sample_table();
    std::swap(t.records[0], t.records[1]);
    EXPECT_THROW(validate_table(t), InvariantError);
    DatasetTable bad_name = sample_table();
    bad_name.name = "../escape";
    EXPECT_THROW(validate_table(bad_name), InvariantError);
}

TEST(Datastore, AllTonesRoundTripThroughSnapshot) {
    std::vector<ExampleRecord> records;
    RecordId id = 1;
    for (Tone tone : kAllTones) records.push_back(tfx::make_record(id++, tone, "x"));
    const DatasetTable t = tfx::make_table("tones", records);
    EXPECT_EQ(parse_table(serialize_table(t), "tones", Timestamp{}).records, t.records);
}

// Random tables with hostile text survive save/load field for field.
TEST(DatastoreProperty, RandomRoundTrip) {
    const std::vector<std::string> alphabet = {"a", "Z", " ", ",", "\"", "\n", "\r\n", "é", "日本", "🙂", "[2]", "{", "}", "\\", "\t"};
    std::mt19937_64 rng(2024);
    auto text = [&](std::size_t min_len) {
        std::string s;
        const std::size_t n = min_len + rng() % 12;
        for (std::size_t i = 0; i < n; ++i) s += alphabet[rng() % alphabet.size()];
        if (s.find_first_not_of(" \t\r\n") == std::string::npos) s += "x";
        return s;
    };
    for (int trial = 0; trial < 60; ++trial) {
        tfx::TempDir dir;
        DatasetTable t;
        t.name = "prop";
        RecordId id = 0;
        const int n = 1 + static_cast<int>(rng() % 15);
        for (int i = 0; i < n; ++i) {
            id += 1 + static_cast<RecordId>(rng() % 3);
            ExampleRecord r = tfx::make_record(id, kAllTones[rng() % 9], text(1));
            r.synth_model = text(1);
            r.created_at = at(2024, 1, 1) + std::chrono::seconds(rng() % 100000000);
            if (rng() % 2) {
                r.rewrite_text = text(1);
                r.rewrite_model = text(1);
                if (rng() % 2) {
                    JudgeVerdict v = make_verdict({1 + int(rng() % 3), 1 + int(rng() % 3), 1 + int(rng() % 3), 1 + int(rng() % 3)},
                                                  rng() % 2 == 0, text(0));
                    for (auto& a : v.aspects) a.rationale = text(0);
                    if (rng() % 5 == 0) v.aspects[rng() % 4].grade.reset();
                    r.verdict = v;
                }
                if (rng() % 3 == 0) r.human_score = HumanScore{int(rng() % 4), text(1), r.created_at};
            }
            t.records.push_back(std::move(r));
        }
        save_table(t, dir.path(), fixed(at(2025, 1, 1)));
        const DatasetTable back = load_latest("prop", dir.path());
        ASSERT_EQ(back.records, t.records) << "trial " << trial;
    }
}
