#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "test_support.hpp"
#include "toneforge/annotation.hpp"

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

// The shipped mock configuration, relocated into a scratch directory.
class Cli : public ::testing::Test {
protected:
    void SetUp() override { config_ = tfx::write_mock_config(dir_); }

    Outcome run(std::vector<std::string> args) {
        args.insert(args.begin(), {"toneforge", "--config", config_.string()});
        std::vector<const char*> argv;
        for (const std::string& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = toneforge::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return {code, out.str(), err.str()};
    }

    tfx::TempDir dir_;
    std::filesystem::path config_;
};

}  // namespace

TEST_F(Cli, GenerateOneTone) {
    const Outcome o = run({"generate", "--tone", "professional", "--count", "20"});
    EXPECT_EQ(o.code, 0) << o.err;
    EXPECT_NE(o.out.find("professional: 18/20"), std::string::npos) << o.out;
    EXPECT_NE(o.out.find("snapshot:"), std::string::npos);
}

TEST_F(Cli, ReportBeforeJudgeFails) {
    ASSERT_EQ(run({"generate", "--tone", "witty", "--count", "5"}).code, 0);
    const Outcome o = run({"report"});
    EXPECT_EQ(o.code, 1);
    EXPECT_NE(o.err.find("no judged tables"), std::string::npos) << o.err;
}

TEST_F(Cli, InferenceBeforeGenerateFails) {
    const Outcome o = run({"inference"});
    EXPECT_EQ(o.code, 1);
    EXPECT_FALSE(o.err.empty());
}

TEST_F(Cli, UnknownVerbIsUsageError) {
    const Outcome o = run({"frobnicate"});
    EXPECT_EQ(o.code, 2);
    EXPECT_NE(o.err.find("generate"), std::string::npos);
}

TEST_F(Cli, CountOutOfRangeIsUsageError) {
    EXPECT_EQ(run({"generate", "--count", "0"}).code, 2);
    EXPECT_EQ(run({"generate", "--count", "100000"}).code, 2);
}

TEST_F(Cli, MissingConfigIsPipelineError) {
    std::ostringstream out, err;
    const std::string missing = (dir_ / "nope.yaml").string();
    const char* argv[] = {"toneforge", "--config", missing.c_str(), "report"};
    EXPECT_EQ(toneforge::cli::run(4, argv, out, err), 1);
}

TEST_F(Cli, FullPipelineThroughAgreement) {
    ASSERT_EQ(run({"generate", "--tone", "professional", "--tone", "casual", "--count", "10"}).code, 0);
    ASSERT_EQ(run({"inference"}).code, 0);
    EXPECT_NE(run({"inference"}).out.find("0 pending"), std::string::npos);
    ASSERT_EQ(run({"judge"}).code, 0);

    const Outcome report = run({"report"});
    ASSERT_EQ(report.code, 0) << report.err;
    EXPECT_NE(report.out.find("Avg. Tone"), std::string::npos);
    EXPECT_NE(report.out.find("mock-small"), std::string::npos);

    const Outcome shown = run({"show-results", "-n", "1"});
    EXPECT_EQ(shown.code, 0);
    EXPECT_NE(shown.out.find("Tone: casual | Model: mock-small"), std::string::npos) << shown.out;

    EXPECT_EQ(run({"show-examples", "--min-score", "3.5"}).out, "");

    const Outcome exported = run({"export-human", "--sample", "4", "--seed", "7"});
    ASSERT_EQ(exported.code, 0) << exported.err;
    EXPECT_NE(exported.out.find("4 tasks written"), std::string::npos);

    // Score the exported tasks as an annotator would, then import.
    const auto manifest = dir_ / "data" / "tones.tasks.jsonl";
    std::string results;
    int value = 0;
    for (const auto& task : toneforge::read_manifest(manifest)) {
        results += toneforge::submission_to_json(
                       {task.task_id, toneforge::HumanScore{value++ % 4, "ada", tfx::at(2025, 4, 4)}}) +
                   "\n";
    }
    tfx::write_file(dir_ / "scores.jsonl", results);
    const Outcome imported = run({"import-human", "--results", (dir_ / "scores.jsonl").string()});
    ASSERT_EQ(imported.code, 0) << imported.err;
    EXPECT_NE(imported.out.find("4 updated"), std::string::npos);

    const Outcome agreement = run({"agreement"});
    EXPECT_EQ(agreement.code, 0) << agreement.err;
    EXPECT_NE(agreement.out.find("pairs: 4"), std::string::npos) << agreement.out;
}
