#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>
#include <string>

#include "toneforge/bracket_score.hpp"
#include "toneforge/csv_recovery.hpp"
#include "toneforge/datastore.hpp"
#include "toneforge/lm_router.hpp"
#include "toneforge/mock_backend.hpp"

using namespace toneforge;

namespace {

std::string generated_reply(int rows) {
    std::string s = "Sure! Here are the examples you asked for:\n\n```csv\ntext\n";
    for (int i = 0; i < rows; ++i) s += "\"Hey, could you check item " + std::to_string(i) + " before Friday?\"\n";
    return s + "```\n\nLet me know if you need more!\n";
}

DatasetTable synthetic_table(int n) {
    DatasetTable t;
    t.name = "bench";
    for (int i = 1; i <= n; ++i) {
        ExampleRecord r;
        r.id = i;
        r.tone = kAllTones[static_cast<std::size_t>(i) % 9];
        r.source_text = "Source sentence, number " + std::to_string(i) + " with \"quotes\"";
        r.synth_model = "gen";
        r.rewrite_text = "Rewritten sentence " + std::to_string(i);
        r.rewrite_model = "cand";
        r.verdict = make_verdict({1 + i % 3, 2, 3, 1 + (i / 3) % 3}, i % 7 != 0, "judge");
        t.records.push_back(std::move(r));
    }
    return t;
}

}  // namespace

static void BM_ParseCsvBlock(benchmark::State& state) {
    const std::string reply = generated_reply(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(parse_csv_block(reply));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * reply.size()));
}
BENCHMARK(BM_ParseCsvBlock)->Arg(20)->Arg(100)->Arg(1000);

static void BM_ExtractBracketedScore(benchmark::State& state) {
    const std::string reply =
        "The rewrite keeps the meaning [smile] and the register [thumbsup]. Earlier I said [1], "
        "but after rereading the source it is clearly better. Final grade: [3]\n\nHope this helps.";
    for (auto _ : state) benchmark::DoNotOptimize(extract_bracketed_score(reply));
}
BENCHMARK(BM_ExtractBracketedScore);

static void BM_SerializeTable(benchmark::State& state) {
    const DatasetTable t = synthetic_table(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(serialize_table(t));
}
BENCHMARK(BM_SerializeTable)->Arg(180)->Arg(2000);

static void BM_SaveLoadTable(benchmark::State& state) {
    const DatasetTable t = synthetic_table(static_cast<int>(state.range(0)));
    const auto root = std::filesystem::temp_directory_path() / ("toneforge-bench-" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(root);
    for (auto _ : state) {
        save_table(t, root);
        benchmark::DoNotOptimize(load_latest("bench", root));
    }
    std::filesystem::remove_all(root);
}
BENCHMARK(BM_SaveLoadTable)->Arg(180)->Arg(2000);

static void BM_MockBatch(benchmark::State& state) {
    EndpointConfig ep;
    ep.endpoint_id = "mock";
    ep.kind = EndpointKind::mock;
    ep.model_id = "mock";
    ep.max_concurrency = 8;
    MockRule rule;
    rule.transform.kind = MockTransform::Kind::pick;
    rule.transform.options = {"Fine. [3]", "Okay. [2]", "Poor. [1]"};
    ep.mock_rules = std::make_shared<const MockRuleSet>(std::vector<MockRule>{rule});

    std::vector<ChatRequest> requests;
    for (int i = 0; i < state.range(0); ++i) {
        ChatRequest r;
        r.messages = {{Role::system, "Judge."}, {Role::user, "Rewrite: item " + std::to_string(i)}};
        r.template_name = "judge.accuracy";
        requests.push_back(std::move(r));
    }
    const LmRouter router;
    for (auto _ : state) benchmark::DoNotOptimize(router.complete_batch(ep, requests));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MockBatch)->Arg(100)->Arg(900);
BENCHMARK_MAIN();
