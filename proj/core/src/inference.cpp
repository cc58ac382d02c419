#include "toneforge/inference.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "toneforge/datastore.hpp"
#include "toneforge/errors.hpp"
#include "toneforge/text.hpp"

namespace toneforge {

ChatRequest build_rewrite_request(const PromptRegistry& prompts, Tone tone, std::string_view source) {
    const PromptTemplate& tmpl = prompts.resolve("rewrite." + std::string(to_string(tone)));
    ChatRequest req = render(tmpl, {{"text", std::string(source)}});
    return req;
}

std::string rewrite_one(const Workspace& ws, const EndpointConfig& endpoint, Tone tone, std::string_view source) {
    if (text::trim(source).empty()) throw PreconditionError("cannot rewrite an empty source sentence");
    std::string out = text::trim_copy(ws.router.complete(endpoint, build_rewrite_request(ws.prompts, tone, source)).text);
    if (out.empty()) throw CompletionError(CompletionError::Kind::bad_response, "empty rewrite", 1);
    return out;
}

InferenceRun run_inference(const Workspace& ws, const std::string& table_name, const EndpointConfig& endpoint,
                           const InferenceOptions& options) {
    InferenceRun run;
    try {
        run.table = load_latest(table_name, ws.data_root());
    } catch (const SnapshotNotFound&) {
        throw OrderingError("table '" + table_name + "' has no generated rows; run generate first");
    }
    if (run.table.records.empty()) throw OrderingError("table '" + table_name + "' has no generated rows; run generate first");

    std::vector<const ExampleRecord*> pending;
    for (const ExampleRecord& r : run.table.records) {
        if (options.tone_filter && !options.tone_filter->contains(r.tone)) continue;
        if (r.rewrite_text && !options.force) {
            if (r.rewrite_model != endpoint.model_id) ++run.other_model;
            continue;
        }
        pending.push_back(&r);
    }
    run.pending = pending.size();
    if (run.other_model > 0)
        ws.warn(std::to_string(run.other_model) + " record(s) in '" + table_name +
                "' were rewritten by another model; use a separate table per candidate or --force");
    if (pending.empty()) return run;

    std::vector<ChatRequest> requests;
    requests.reserve(pending.size());
    for (const ExampleRecord* r : pending) requests.push_back(build_rewrite_request(ws.prompts, r->tone, r->source_text));

    const std::vector<BatchItem> results = ws.router.complete_batch(endpoint, requests);
    std::map<RecordId, std::string> rewrites;
    for (std::size_t i = 0; i < pending.size(); ++i) {
        const RecordId id = pending[i]->id;
        if (!results[i].ok()) {
            run.failures.push_back({id, results[i].error->what()});
            continue;
        }
        std::string text = text::trim_copy(results[i].result->text);
        if (text.empty()) {
            run.failures.push_back({id, "empty rewrite"});
            continue;
        }
        rewrites.emplace(id, std::move(text));
    }
    if (rewrites.empty())
        throw Error("inference failed for all " + std::to_string(pending.size()) + " pending record(s): " +
                    run.failures.front().message);

    run.table = upsert_column(
        run.table, [&](const ExampleRecord& r) { return rewrites.contains(r.id); },
        [&](ExampleRecord& r) {
            r.rewrite_text = rewrites.at(r.id);
            r.rewrite_model = endpoint.model_id;
            r.verdict.reset();
            r.human_score.reset();
        });
    run.filled = rewrites.size();
    run.snapshot = save_table(run.table, ws.data_root(), ws.clock);
    run.table = load_snapshot(*run.snapshot);
    return run;
}

std::string model_table_name(std::string_view base, std::string_view endpoint_id) {
    std::string out(base);
    out += "__";
    for (char c : endpoint_id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '.' || c == '-';
        out += ok ? c : '_';
    }
    return out;
}

std::size_t sync_model_table(const Workspace& ws, const std::string& base, const std::string& target) {
    DatasetTable source;
    try {
        source = load_latest(base, ws.data_root());
    } catch (const SnapshotNotFound&) {
        throw OrderingError("table '" + base + "' has no generated rows; run generate first");
    }

    DatasetTable dest;
    const std::vector<SnapshotRef> existing = list_snapshots(target, ws.data_root());
    if (!existing.empty()) {
        dest = load_snapshot(existing.back().path);
    } else {
        dest.name = target;
    }

    std::set<RecordId> have;
    for (const ExampleRecord& r : dest.records) have.insert(r.id);
    std::size_t added = 0;
    for (const ExampleRecord& r : source.records) {
        if (have.contains(r.id)) continue;
        ExampleRecord copy = r;
        copy.rewrite_text.reset();
        copy.rewrite_model.reset();
        copy.verdict.reset();
        copy.human_score.reset();
        dest.records.push_back(std::move(copy));
        ++added;
    }
    if (added == 0) return 0;
    std::sort(dest.records.begin(), dest.records.end(), [](const ExampleRecord& a, const ExampleRecord& b) { return a.id < b.id; });
    save_table(dest, ws.data_root(), ws.clock);
    return added;
}

}  // namespace toneforge
