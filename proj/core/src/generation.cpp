#include "toneforge/generation.hpp"

#include <future>
#include <set>

#include "toneforge/errors.hpp"
#include "toneforge/text.hpp"

namespace toneforge {

namespace {

RenderVars generation_vars(const PromptTemplate& tmpl, Tone tone, int count) {
    const RenderVars available = {
        {"count", std::to_string(count)},
        {"tone", std::string(to_string(tone))},
        {"tone_description", std::string(describe(tone))},
    };
    RenderVars vars;
    for (const std::string& name : tmpl.declared_vars) {
        if (auto it = available.find(name); it != available.end()) vars.insert(*it);
    }
    return vars;
}

struct Collector {
    std::vector<std::string> sentences;
    std::set<std::string> keys;
    std::string last_raw;
    std::size_t parsed_replies = 0;

    void add(const std::vector<std::string>& texts) {
        for (const std::string& t : texts) {
            if (keys.insert(text::dedup_key(t)).second) sentences.push_back(t);
        }
    }
};

// Splits `count` across the prompts and collects every reply.
void ask(const Workspace& ws, const EndpointConfig& endpoint, const GenerationSpec& spec,
         const std::vector<std::string>& prompts, int count, Collector& out, GeneratedExamples& result) {
    std::vector<ChatRequest> requests;
    const int n = static_cast<int>(prompts.size());
    for (int p = 0; p < n; ++p) {
        const int share = count / n + (p < count % n ? 1 : 0);
        if (share == 0) continue;
        const PromptTemplate& tmpl = ws.prompts.resolve(prompts[static_cast<std::size_t>(p)]);
        requests.push_back(render(tmpl, generation_vars(tmpl, spec.tone, share)));
    }
    result.asks += static_cast<int>(requests.size());

    std::vector<BatchItem> replies = ws.router.complete_batch(endpoint, requests);
    std::optional<CompletionError> first_error;
    std::size_t failed = 0;
    for (BatchItem& item : replies) {
        if (!item.ok()) {
            ++failed;
            if (!first_error) first_error = item.error;
            continue;
        }
        out.last_raw = item.result->text;
        try {
            CsvBlock block = parse_csv_block(item.result->text);
            ++out.parsed_replies;
            result.diagnostics.insert(result.diagnostics.end(), block.diagnostics.begin(), block.diagnostics.end());
            out.add(block.texts());
        } catch (const ParseFailure& e) {
            result.diagnostics.push_back({0, e.what()});
        }
    }
    if (failed == replies.size() && first_error) throw *first_error;
}

}  // namespace

GeneratedExamples generate_examples(const Workspace& ws, const GenerationSpec& spec) {
    if (spec.requested_count < 1 || spec.requested_count > kMaxRequestedCount)
        throw PreconditionError("requested_count must be within 1.." + std::to_string(kMaxRequestedCount));
    const EndpointConfig& endpoint = ws.config.endpoint(spec.generator_endpoint);
    std::vector<std::string> prompts = spec.prompt_names;
    if (prompts.empty()) prompts.push_back("generate." + std::string(to_string(spec.tone)));

    const auto requested = static_cast<std::size_t>(spec.requested_count);
    auto accepted = [&](std::size_t n) { return static_cast<double>(n) >= kMinYieldFraction * static_cast<double>(requested); };

    GeneratedExamples result;
    result.synth_model = endpoint.model_id;
    Collector collected;
    ask(ws, endpoint, spec, prompts, spec.requested_count, collected, result);
    if (!accepted(collected.sentences.size())) {
        const auto deficit = static_cast<int>(requested - collected.sentences.size());
        ask(ws, endpoint, spec, prompts, deficit, collected, result);
    }

    if (collected.sentences.empty() && collected.parsed_replies == 0)
        throw ParseFailure("generator reply for tone " + std::string(to_string(spec.tone)) + " had no parseable CSV rows",
                           collected.last_raw);
    if (!accepted(collected.sentences.size())) throw GenerationShortfall(collected.sentences.size(), requested);

    if (collected.sentences.size() > requested) collected.sentences.resize(requested);
    result.sentences = std::move(collected.sentences);
    return result;
}

bool GenerationRun::all_succeeded() const noexcept {
    for (const ToneYield& y : yields) {
        if (y.error) return false;
    }
    return true;
}

GenerationRun run_generation(const Workspace& ws, const std::string& table_name, const std::vector<GenerationSpec>& specs) {
    if (specs.empty()) throw PreconditionError("no generation specs");
    std::set<Tone> tones;
    for (const GenerationSpec& s : specs) {
        if (!tones.insert(s.tone).second) throw PreconditionError("duplicate tone " + std::string(to_string(s.tone)));
    }
    if (!valid_table_name(table_name)) throw PreconditionError("invalid table name '" + table_name + "'");

    GenerationRun run;
    const std::vector<SnapshotRef> existing = list_snapshots(table_name, ws.data_root());
    if (existing.empty()) {
        run.table.name = table_name;
    } else {
        run.table = load_snapshot(existing.back().path);
    }

    std::vector<std::future<GeneratedExamples>> jobs;
    jobs.reserve(specs.size());
    for (const GenerationSpec& spec : specs)
        jobs.push_back(std::async(std::launch::async, [&ws, &spec] { return generate_examples(ws, spec); }));

    std::set<std::string> run_keys;
    RecordId next_id = max_id(run.table) + 1;
    const Timestamp now = ws.clock();
    for (std::size_t i = 0; i < specs.size(); ++i) {
        ToneYield yield{specs[i].tone, specs[i].requested_count, 0, std::nullopt};
        try {
            GeneratedExamples got = jobs[i].get();
            for (std::string& sentence : got.sentences) {
                if (!run_keys.insert(text::dedup_key(sentence)).second) continue;
                ExampleRecord r;
                r.id = next_id++;
                r.source_text = std::move(sentence);
                r.tone = specs[i].tone;
                r.synth_model = got.synth_model;
                r.created_at = now;
                run.table.records.push_back(std::move(r));
                ++yield.obtained;
            }
        } catch (const std::exception& e) {
            yield.error = e.what();
            ws.warn("generate " + std::string(to_string(specs[i].tone)) + ": " + e.what());
        }
        run.yields.push_back(std::move(yield));
    }

    bool added = false;
    for (const ToneYield& y : run.yields) added = added || y.obtained > 0;
    if (added) {
        run.snapshot = save_table(run.table, ws.data_root(), ws.clock);
        run.table = load_snapshot(*run.snapshot);
    }
    return run;
}

}  // namespace toneforge
