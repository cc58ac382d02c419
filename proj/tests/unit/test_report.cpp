#include <gtest/gtest.h>

#include <iterator>
#include <random>
#include <sstream>

#include "test_support.hpp"
#include "toneforge/errors.hpp"
#include "toneforge/report.hpp"

using namespace toneforge;

namespace {

ExampleRecord judged(RecordId id, Tone tone, std::array<int, 4> grades, bool is_rewrite = true,
                     std::string model = "cand") {
    ExampleRecord r = tfx::rewritten(tfx::make_record(id, tone, "src " + std::to_string(id)),
                                     "rw " + std::to_string(id), std::move(model));
    r.verdict = make_verdict(grades, is_rewrite, "judge");
    return r;
}

std::size_t column(Tone t) {
    return static_cast<std::size_t>(std::find(kReportToneOrder.begin(), kReportToneOrder.end(), t) -
                                    kReportToneOrder.begin());
}

}  // namespace

TEST(ToneTable, CellIsMeanOfNormalizedScores) {
    const DatasetTable t = tfx::make_table("eval", {
        judged(1, Tone::professional, {3, 3, 3, 3}),
        judged(2, Tone::professional, {3, 3, 3, 3}),
        judged(3, Tone::casual, {1, 1, 1, 1}),
        judged(4, Tone::casual, {3, 3, 3, 3}),
    });
    const ToneTable table = tone_table({t});
    ASSERT_EQ(table.rows.size(), 1u);
    const auto& row = table.rows[0];
    EXPECT_DOUBLE_EQ(*row.cells[column(Tone::professional)], 100.0);
    EXPECT_DOUBLE_EQ(*row.cells[column(Tone::casual)], 50.0);
    EXPECT_DOUBLE_EQ(*row.average, 75.0);
    EXPECT_FALSE(row.cells[column(Tone::witty)]);
}

TEST(ToneTable, ConversationsCountAsZeroAndInvalidVerdictsAreSkipped) {
    ExampleRecord broken = judged(3, Tone::emojify, {2, 2, 2, 2});
    broken.verdict->aspects[0].grade.reset();
    const DatasetTable t = tfx::make_table("eval", {
        judged(1, Tone::emojify, {3, 3, 3, 3}),
        judged(2, Tone::emojify, {3, 3, 3, 3}, false),
        broken,
    });
    EXPECT_DOUBLE_EQ(*tone_table({t}).rows[0].cells[column(Tone::emojify)], 50.0);
}

TEST(ToneTable, MissingToneIsBlankAndExcludedFromAverage) {
    const DatasetTable t = tfx::make_table("eval", {
        judged(1, Tone::shorten, {2, 2, 2, 2}),
        judged(2, Tone::keypoints, {3, 3, 3, 3}),
    });
    const ToneTable table = tone_table({t});
    EXPECT_DOUBLE_EQ(*table.rows[0].average, 75.0);
    const std::string text = render_tone_table(table);
    EXPECT_NE(text.find("Witty"), std::string::npos);
    EXPECT_NE(text.find("Avg. Tone"), std::string::npos);
    EXPECT_NE(text.find("50.0"), std::string::npos);
    EXPECT_NE(text.find("75.0"), std::string::npos);
    // Two present cells plus the average; the seven missing tones stay blank.
    std::istringstream row(text.substr(text.find('\n') + 1));
    std::vector<std::string> tokens{std::istream_iterator<std::string>(row), {}};
    EXPECT_EQ(tokens, (std::vector<std::string>{"cand", "50.0", "100.0", "75.0"}));
}

TEST(ToneTable, MatchesBruteForceOverRandomFixtures) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> g(1, 3);
    std::bernoulli_distribution convo(0.1);
    const std::vector<std::string> models{"m-a", "m-b", "m-c"};
    std::vector<DatasetTable> tables;
    std::map<std::pair<std::string, Tone>, std::vector<double>> expected;
    RecordId id = 1;
    for (const std::string& model : models) {
        std::vector<ExampleRecord> records;
        for (Tone tone : kAllTones) {
            for (int k = 0; k < 7; ++k) {
                const std::array<int, 4> grades{g(rng), g(rng), g(rng), g(rng)};
                const bool rewrite = !convo(rng);
                records.push_back(judged(id++, tone, grades, rewrite, model));
                const double mean = (grades[0] + grades[1] + grades[2] + grades[3]) / 4.0;
                expected[{model, tone}].push_back(rewrite ? (mean - 1.0) * 50.0 : 0.0);
            }
        }
        tables.push_back(tfx::make_table("eval__" + model, std::move(records)));
    }
    const ToneTable table = tone_table(tables);
    ASSERT_EQ(table.rows.size(), 3u);
    for (const std::string& model : models) {
        const auto* row = table.find(model);
        ASSERT_NE(row, nullptr);
        double total = 0;
        for (Tone tone : kAllTones) {
            const auto& v = expected[{model, tone}];
            double sum = 0;
            for (double x : v) sum += x;
            const double cell = sum / static_cast<double>(v.size());
            EXPECT_NEAR(*row->cells[column(tone)], cell, 1e-9);
            total += cell;
        }
        EXPECT_NEAR(*row->average, total / 9.0, 1e-9);
    }
}

TEST(ToneTable, TableWithoutValidVerdictsFails) {
    const DatasetTable t = tfx::make_table("eval", {tfx::rewritten(tfx::make_record(1, Tone::witty, "x"), "y")});
    EXPECT_THROW(tone_table({t}), Error);
}

TEST(ShowResults, ReproducesPublishedLayout) {
    EXPECT_EQ(show_results(tfx::appendix_table(), 2), tfx::read_file(tfx::golden_dir() / "show_results_appendix.txt"));
}

TEST(ShowResults, LimitsPerGroupAndToleratesLargeN) {
    const DatasetTable t = tfx::appendix_table();
    const std::string one = show_results(t, 1);
    EXPECT_NE(one.find("Example 6418:"), std::string::npos);
    EXPECT_EQ(one.find("Example 6499:"), std::string::npos);
    EXPECT_NE(one.find("Example 6520:"), std::string::npos);
    EXPECT_EQ(show_results(t, 50), show_results(t, 2));
    EXPECT_THROW(show_results(t, 0), PreconditionError);
}

TEST(ShowResults, EmptyTableSaysSo) {
    const DatasetTable t = tfx::make_table("eval", {tfx::rewritten(tfx::make_record(1, Tone::witty, "x"), "y")});
    EXPECT_EQ(show_results(t, 2), "no judged examples\n");
}

TEST(ShowExamples, FiltersByToneModelAndScore) {
    const DatasetTable t = tfx::appendix_table();
    EXPECT_EQ(show_examples(t), show_results(t, 100));
    const std::string casual = show_examples(t, {Tone::casual, std::nullopt, std::nullopt});
    EXPECT_NE(casual.find("Example 6418:"), std::string::npos);
    EXPECT_EQ(casual.find("professional"), std::string::npos);
    const std::string high = show_examples(t, {std::nullopt, std::nullopt, 2.5});
    EXPECT_NE(high.find("Example 6499:"), std::string::npos);
    EXPECT_NE(high.find("Example 6550:"), std::string::npos);
    EXPECT_EQ(high.find("Example 6520:"), std::string::npos);
    EXPECT_EQ(show_examples(t, {std::nullopt, std::nullopt, 3.1}), "");
    EXPECT_EQ(show_examples(t, {std::nullopt, std::string("other"), std::nullopt}), "");
}
