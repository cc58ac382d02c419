#include "toneforge/llm_judge.hpp"

#include <map>

#include "toneforge/errors.hpp"

namespace toneforge {

namespace {

constexpr std::size_t kCallsPerInput = 1 + kAllAspects.size();

RenderVars judge_vars(const PromptTemplate& tmpl, const JudgeInput& in) {
    const RenderVars available = {
        {"tone", std::string(to_string(in.tone))},
        {"tone_description", std::string(describe(in.tone))},
        {"source", in.source},
        {"rewrite", in.rewrite},
    };
    RenderVars vars;
    for (const std::string& name : tmpl.declared_vars) {
        if (auto it = available.find(name); it != available.end()) vars.insert(*it);
    }
    return vars;
}

ChatRequest judge_request(const Workspace& ws, std::string_view template_name, const JudgeInput& in) {
    const PromptTemplate& tmpl = ws.prompts.resolve(template_name);
    return render(tmpl, judge_vars(tmpl, in));
}

struct CallOutcome {
    std::optional<BracketScore> score;
    std::string raw;
    std::optional<std::string> router_error;
};

std::optional<BracketScore> try_extract(const std::string& text, bool detection) {
    try {
        return detection ? extract_bracketed_score(text, {1, 3}) : extract_bracketed_score(text);
    } catch (const ExtractionError&) {
        return std::nullopt;
    }
}

// Runs the calls through one batch, then re-asks every call whose reply had
// no usable score once with the format reminder appended.
std::vector<CallOutcome> run_calls(const Workspace& ws, const EndpointConfig& endpoint, std::vector<ChatRequest> requests,
                                   const std::vector<bool>& detection) {
    std::vector<CallOutcome> out(requests.size());
    const std::vector<BatchItem> first = ws.router.complete_batch(endpoint, requests);
    std::vector<std::size_t> retry;
    for (std::size_t i = 0; i < requests.size(); ++i) {
        if (!first[i].ok()) {
            out[i].router_error = first[i].error->what();
            continue;
        }
        out[i].raw = first[i].result->text;
        out[i].score = try_extract(out[i].raw, detection[i]);
        if (!out[i].score) retry.push_back(i);
    }
    if (retry.empty()) return out;

    std::vector<ChatRequest> again;
    again.reserve(retry.size());
    for (std::size_t i : retry) {
        ChatRequest req = requests[i];
        req.messages.back().text += kFormatReminder;
        again.push_back(std::move(req));
    }
    const std::vector<BatchItem> second = ws.router.complete_batch(endpoint, again);
    for (std::size_t k = 0; k < retry.size(); ++k) {
        CallOutcome& slot = out[retry[k]];
        if (!second[k].ok()) {
            slot.router_error = second[k].error->what();
            continue;
        }
        slot.raw = second[k].result->text;
        slot.score = try_extract(slot.raw, detection[retry[k]]);
    }
    return out;
}

AspectScore to_aspect(Aspect aspect, const CallOutcome& call) {
    AspectScore s{aspect, std::nullopt, call.raw};
    if (call.score) {
        s.grade = call.score->score;
        s.rationale = call.score->rationale;
    }
    return s;
}

}  // namespace

std::string aspect_template_name(Aspect aspect) { return "judge." + std::string(to_string(aspect)); }

std::vector<std::optional<JudgeVerdict>> judge_many(const Workspace& ws, const EndpointConfig& endpoint,
                                                    const std::vector<JudgeInput>& inputs,
                                                    std::vector<std::pair<std::size_t, std::string>>* failures) {
    std::vector<ChatRequest> requests;
    std::vector<bool> detection;
    requests.reserve(inputs.size() * kCallsPerInput);
    for (const JudgeInput& in : inputs) {
        if (in.rewrite.empty()) throw PreconditionError("cannot judge an empty rewrite");
        requests.push_back(judge_request(ws, kDetectionTemplate, in));
        detection.push_back(true);
        for (Aspect a : kAllAspects) {
            requests.push_back(judge_request(ws, aspect_template_name(a), in));
            detection.push_back(false);
        }
    }

    const std::vector<CallOutcome> calls = run_calls(ws, endpoint, std::move(requests), detection);
    std::vector<std::optional<JudgeVerdict>> out(inputs.size());
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const CallOutcome* group = &calls[k * kCallsPerInput];
        std::optional<std::string> error;
        for (std::size_t j = 0; j < kCallsPerInput && !error; ++j) error = group[j].router_error;
        if (error) {
            if (failures) failures->emplace_back(k, *error);
            continue;
        }
        JudgeVerdict v;
        v.judge_model = endpoint.model_id;
        if (group[0].score) v.is_rewrite = group[0].score->score == 3;
        for (std::size_t a = 0; a < kAllAspects.size(); ++a) v.aspects[a] = to_aspect(kAllAspects[a], group[1 + a]);
        out[k] = std::move(v);
    }
    return out;
}

std::array<AspectScore, 4> judge_aspects(const Workspace& ws, const EndpointConfig& endpoint, Tone tone,
                                         std::string_view source, std::string_view rewrite) {
    if (rewrite.empty()) throw PreconditionError("cannot judge an empty rewrite");
    const JudgeInput in{tone, std::string(source), std::string(rewrite)};
    std::vector<ChatRequest> requests;
    for (Aspect a : kAllAspects) requests.push_back(judge_request(ws, aspect_template_name(a), in));
    const std::vector<CallOutcome> calls = run_calls(ws, endpoint, std::move(requests), std::vector<bool>(4, false));

    std::array<AspectScore, 4> out;
    for (std::size_t a = 0; a < kAllAspects.size(); ++a) {
        if (calls[a].router_error) throw Error(*calls[a].router_error);
        out[a] = to_aspect(kAllAspects[a], calls[a]);
    }
    return out;
}

bool detect_conversation(const Workspace& ws, const EndpointConfig& endpoint, std::string_view source,
                         std::string_view rewrite) {
    if (rewrite.empty()) throw PreconditionError("cannot judge an empty rewrite");
    const JudgeInput in{Tone::professional, std::string(source), std::string(rewrite)};
    const std::vector<CallOutcome> calls =
        run_calls(ws, endpoint, {judge_request(ws, kDetectionTemplate, in)}, std::vector<bool>{true});
    if (calls[0].router_error) throw Error(*calls[0].router_error);
    if (!calls[0].score)
        throw ExtractionError("rewrite detector gave no [1] or [3] verdict", calls[0].raw);
    return calls[0].score->score == 3;
}

JudgeVerdict judge_verdict(const Workspace& ws, const EndpointConfig& endpoint, Tone tone, std::string_view source,
                           std::string_view rewrite) {
    std::vector<std::pair<std::size_t, std::string>> failures;
    auto verdicts = judge_many(ws, endpoint, {JudgeInput{tone, std::string(source), std::string(rewrite)}}, &failures);
    if (!verdicts.front()) throw Error(failures.front().second);
    return std::move(*verdicts.front());
}

JudgeRun run_judge(const Workspace& ws, const std::string& table_name, const EndpointConfig& endpoint,
                   const JudgeOptions& options) {
    JudgeRun run;
    try {
        run.table = load_latest(table_name, ws.data_root());
    } catch (const SnapshotNotFound&) {
        throw OrderingError("table '" + table_name + "' does not exist; run generate and inference first");
    }

    std::vector<const ExampleRecord*> pending;
    bool any_rewrite = false;
    bool same_model = false;
    for (const ExampleRecord& r : run.table.records) {
        if (!r.rewrite_text) continue;
        any_rewrite = true;
        if (r.verdict && !options.force) continue;
        same_model = same_model || r.rewrite_model == endpoint.model_id;
        pending.push_back(&r);
    }
    if (!any_rewrite) ws.warn("table '" + table_name + "' has no rewrites; run inference first");
    run.pending = pending.size();
    if (pending.empty()) return run;
    if (same_model)
        ws.warn("judge model '" + endpoint.model_id + "' also produced rewrites in '" + table_name +
                "'; use an independent judge to avoid self-preference bias");

    std::vector<JudgeInput> inputs;
    inputs.reserve(pending.size());
    for (const ExampleRecord* r : pending) inputs.push_back({r->tone, r->source_text, *r->rewrite_text});

    std::vector<std::pair<std::size_t, std::string>> failures;
    std::vector<std::optional<JudgeVerdict>> verdicts = judge_many(ws, endpoint, inputs, &failures);
    for (const auto& [index, message] : failures) run.failures.push_back({pending[index]->id, message});

    std::map<RecordId, JudgeVerdict> by_id;
    for (std::size_t i = 0; i < pending.size(); ++i) {
        if (!verdicts[i]) continue;
        if (!verdicts[i]->valid()) ++run.invalid;
        by_id.emplace(pending[i]->id, std::move(*verdicts[i]));
    }
    run.judged = by_id.size();
    if (by_id.empty()) return run;

    run.table = upsert_column(
        run.table, [&](const ExampleRecord& r) { return by_id.contains(r.id); },
        [&](ExampleRecord& r) { r.verdict = by_id.at(r.id); });
    run.snapshot = save_table(run.table, ws.data_root(), ws.clock);
    run.table = load_snapshot(*run.snapshot);
    return run;
}

}  // namespace toneforge
