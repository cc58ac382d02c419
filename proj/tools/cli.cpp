#include "cli.hpp"

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "toneforge/agreement.hpp"
#include "toneforge/annotation.hpp"
#include "toneforge/annotation_server.hpp"
#include "toneforge/errors.hpp"
#include "toneforge/generation.hpp"
#include "toneforge/inference.hpp"
#include "toneforge/llm_judge.hpp"
#include "toneforge/report.hpp"
#include "toneforge/workspace.hpp"

namespace toneforge::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config;
    std::string table;
    std::string model;  // candidate endpoint; selects the per-model table
    std::string judge;
    std::vector<std::string> tones;
    int count = 0;
    int n = 2;
    bool force = false;
    std::size_t sample = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::string manifest;
    std::string results;
    std::string assets;
    std::string host = "127.0.0.1";
    int port = 8765;
    std::string rewrite_model;
    double min_score = 0.0;
};

// The pipeline error a user can act on, as opposed to a usage error.
struct Failure : Error {
    using Error::Error;
};

std::vector<Tone> selected_tones(const Options& o, const PipelineConfig& cfg) {
    if (o.tones.empty()) return cfg.tones;
    std::vector<Tone> out;
    for (const auto& name : o.tones) out.push_back(parse_tone(name));
    return out;
}

const EndpointConfig& candidate(const Workspace& ws, const Options& o) {
    return o.model.empty() ? ws.config.role_endpoint("candidate") : ws.config.endpoint(o.model);
}

// Base table for the configured candidate, <base>__<endpoint> for any other.
std::string table_for(const Workspace& ws, const Options& o) {
    if (!o.table.empty()) return o.table;
    if (o.model.empty()) return ws.config.table;
    auto role = ws.config.roles.find("candidate");
    if (role != ws.config.roles.end() && role->second == o.model) return ws.config.table;
    return model_table_name(ws.config.table, o.model);
}

DatasetTable load_existing(const Workspace& ws, const std::string& name) {
    try {
        return load_latest(name, ws.data_root());
    } catch (const SnapshotNotFound&) {
        throw OrderingError("table '" + name + "' does not exist; run generate first");
    }
}

int do_generate(Workspace& ws, const Options& o, std::ostream& out, std::ostream& err) {
    const EndpointConfig& gen = ws.config.role_endpoint("generator");
    const int count = o.count > 0 ? o.count : ws.config.default_count;
    std::vector<GenerationSpec> specs;
    for (Tone t : selected_tones(o, ws.config)) specs.push_back({t, count, gen.endpoint_id, ws.config.prompts_for(t)});
    const std::string table = o.table.empty() ? ws.config.table : o.table;
    const GenerationRun run = run_generation(ws, table, specs);
    for (const ToneYield& y : run.yields) {
        out << to_string(y.tone) << ": " << y.obtained << "/" << y.requested;
        if (y.error) out << "  FAILED: " << *y.error;
        out << '\n';
    }
    if (run.snapshot) out << "snapshot: " << run.snapshot->string() << '\n';
    if (!run.all_succeeded()) {
        err << "error: generation failed for some tones; the others were saved\n";
        return 1;
    }
    return 0;
}

int do_inference(Workspace& ws, const Options& o, std::ostream& out, std::ostream&) {
    const EndpointConfig& ep = candidate(ws, o);
    const std::string table = table_for(ws, o);
    if (table != ws.config.table && o.table.empty()) {
        const std::size_t added = sync_model_table(ws, ws.config.table, table);
        if (added > 0) out << "seeded " << added << " records into " << table << '\n';
    }
    InferenceOptions opts;
    opts.force = o.force;
    if (!o.tones.empty()) {
        std::set<Tone> filter;
        for (Tone t : selected_tones(o, ws.config)) filter.insert(t);
        opts.tone_filter = filter;
    }
    const InferenceRun run = run_inference(ws, table, ep, opts);
    if (run.pending == 0) {
        out << table << ": 0 pending\n";
        return 0;
    }
    out << table << ": " << run.filled << "/" << run.pending << " rewritten by " << ep.model_id << '\n';
    for (const RecordFailure& f : run.failures) out << "  record " << f.id << ": " << f.message << '\n';
    if (run.snapshot) out << "snapshot: " << run.snapshot->string() << '\n';
    return run.failures.empty() ? 0 : 1;
}

int do_judge(Workspace& ws, const Options& o, std::ostream& out, std::ostream&) {
    const EndpointConfig& judge = o.judge.empty() ? ws.config.role_endpoint("judge") : ws.config.endpoint(o.judge);
    const std::string table = table_for(ws, o);
    const JudgeRun run = run_judge(ws, table, judge, JudgeOptions{o.force});
    if (run.pending == 0) {
        out << table << ": 0 pending\n";
        return 0;
    }
    out << table << ": " << run.judged << "/" << run.pending << " judged by " << judge.model_id;
    if (run.invalid > 0) out << " (" << run.invalid << " invalid)";
    out << '\n';
    for (const RecordFailure& f : run.failures) out << "  record " << f.id << ": " << f.message << '\n';
    if (run.snapshot) out << "snapshot: " << run.snapshot->string() << '\n';
    return run.failures.empty() ? 0 : 1;
}

int do_report(Workspace& ws, const Options& o, std::ostream& out, std::ostream&) {
    std::vector<DatasetTable> judged;
    std::vector<std::string> names;
    if (!o.table.empty()) {
        names.push_back(o.table);
    } else {
        const std::string prefix = ws.config.table + "__";
        for (const std::string& name : list_tables(ws.data_root())) {
            if (name == ws.config.table || name.starts_with(prefix)) names.push_back(name);
        }
    }
    for (const std::string& name : names) {
        if (list_snapshots(name, ws.data_root()).empty()) continue;
        DatasetTable t = load_latest(name, ws.data_root());
        const bool any = std::any_of(t.records.begin(), t.records.end(),
                                     [](const ExampleRecord& r) { return r.verdict && r.verdict->valid(); });
        if (any) judged.push_back(std::move(t));
    }
    if (judged.empty()) throw Failure("no judged tables; run judge first");
    out << render_tone_table(tone_table(judged));
    return 0;
}

int do_export(Workspace& ws, const Options& o, std::ostream& out, std::ostream&) {
    const std::string table = table_for(ws, o);
    std::optional<std::size_t> sample;
    if (o.sample > 0) sample = o.sample;
    std::optional<fs::path> dest;
    if (!o.out.empty()) dest = fs::path(o.out);
    const ExportResult res = export_tasks(ws, table, sample, o.seed, dest);
    out << res.tasks.size() << " tasks written to " << res.manifest.string() << '\n';
    return 0;
}

std::atomic<AnnotationServer*> g_server{nullptr};

extern "C" void stop_server(int) {
    if (AnnotationServer* s = g_server.load()) s->stop();
}

int do_serve(Workspace& ws, const Options& o, std::ostream& out, std::ostream&) {
    const std::string table = table_for(ws, o);
    const fs::path manifest = o.manifest.empty() ? manifest_path(ws, table) : fs::path(o.manifest);
    const fs::path results = o.results.empty() ? results_path(ws, table) : fs::path(o.results);
    AnnotationService service(read_manifest(manifest), results, ws.clock);
    std::optional<fs::path> assets;
    if (!o.assets.empty()) assets = fs::path(o.assets);
    AnnotationServer server(service, assets);
    const int port = server.bind(o.host, o.port);
    const Progress p = service.progress();
    out << "serving " << p.total << " tasks (" << p.scored << " scored) on http://" << o.host << ":" << port << "/\n";
    out << "results: " << results.string() << '\n' << std::flush;
    g_server = &server;
    auto previous_int = std::signal(SIGINT, stop_server);
    auto previous_term = std::signal(SIGTERM, stop_server);
    server.serve();
    std::signal(SIGINT, previous_int);
    std::signal(SIGTERM, previous_term);
    g_server = nullptr;
    out << service.progress().scored << " of " << p.total << " tasks scored\n";
    return 0;
}

int do_import(Workspace& ws, const Options& o, std::ostream& out, std::ostream& err) {
    const std::string table = table_for(ws, o);
    const fs::path results = o.results.empty() ? results_path(ws, table) : fs::path(o.results);
    const ImportRun run = import_results(ws, table, results);
    out << run.updated << " updated, " << run.unchanged << " unchanged, " << run.errors.size() << " rejected\n";
    for (const ImportError& e : run.errors) err << results.string() << ":" << e.line << ": " << e.message << '\n';
    if (run.snapshot) out << "snapshot: " << run.snapshot->string() << '\n';
    return 0;
}

int do_agreement(Workspace& ws, const Options& o, std::ostream& out, std::ostream&) {
    out << format_agreement(compute_agreement(load_existing(ws, table_for(ws, o))));
    return 0;
}

int do_show_results(Workspace& ws, const Options& o, std::ostream& out, std::ostream&) {
    out << show_results(load_existing(ws, table_for(ws, o)), o.n);
    return 0;
}

int do_show_examples(Workspace& ws, const Options& o, std::ostream& out, std::ostream&, const CLI::App& sub) {
    ExampleFilter filter;
    if (!o.tones.empty()) {
        if (o.tones.size() > 1) throw PreconditionError("show-examples takes one --tone");
        filter.tone = parse_tone(o.tones.front());
    }
    if (!o.rewrite_model.empty()) filter.model = o.rewrite_model;
    if (sub.count("--min-score") > 0) filter.min_score = o.min_score;
    out << show_examples(load_existing(ws, table_for(ws, o)), filter);
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tone-rewrite evaluation pipeline: generate, rewrite, judge, annotate, report."};
    app.name("toneforge");
    app.require_subcommand(1);

    Options o;
    const char* env_config = std::getenv("TONEFORGE_CONFIG");
    o.config = env_config && *env_config ? env_config : "toneforge.yaml";
    app.add_option("--config", o.config, "Pipeline configuration (YAML); default $TONEFORGE_CONFIG or ./toneforge.yaml");

    auto table_opt = [&](CLI::App* sub) { sub->add_option("--table", o.table, "Table name (overrides --model routing)"); };
    auto model_opt = [&](CLI::App* sub) {
        sub->add_option("--model", o.model, "Candidate endpoint id; non-default candidates use <table>__<id>");
    };

    auto* gen = app.add_subcommand("generate", "Synthesize source sentences per tone");
    gen->add_option("--tone", o.tones, "Tone(s) to generate; default all configured");
    gen->add_option("--count", o.count, "Sentences per tone")->check(CLI::Range(1, kMaxRequestedCount));
    table_opt(gen);

    auto* inf = app.add_subcommand("inference", "Rewrite pending sentences with a candidate model");
    model_opt(inf);
    table_opt(inf);
    inf->add_option("--tone", o.tones, "Restrict to these tones");
    inf->add_flag("--force", o.force, "Rewrite records that already hold a rewrite");

    auto* jud = app.add_subcommand("judge", "Score rewrites with the LLM judge");
    model_opt(jud);
    table_opt(jud);
    jud->add_option("--judge", o.judge, "Judge endpoint id; default the judge role");
    jud->add_flag("--force", o.force, "Re-judge records that already hold a verdict");

    auto* rep = app.add_subcommand("report", "Model x tone table of mean 0-100 scores");
    table_opt(rep);

    auto* exp = app.add_subcommand("export-human", "Write the human annotation manifest");
    model_opt(exp);
    table_opt(exp);
    exp->add_option("--sample", o.sample, "Seeded random sample size");
    exp->add_option("--seed", o.seed, "Sampling seed");
    exp->add_option("--out", o.out, "Manifest path");

    auto* srv = app.add_subcommand("serve-annotate", "Serve the annotation API and UI");
    model_opt(srv);
    table_opt(srv);
    srv->add_option("--manifest", o.manifest, "Manifest path");
    srv->add_option("--results", o.results, "Results log path");
    srv->add_option("--assets", o.assets, "Static UI directory mounted at /");
    srv->add_option("--host", o.host, "Bind address");
    srv->add_option("--port", o.port, "Port; 0 picks a free one")->check(CLI::Range(0, 65535));

    auto* imp = app.add_subcommand("import-human", "Merge human scores into the table");
    model_opt(imp);
    table_opt(imp);
    imp->add_option("--results", o.results, "Results file");

    auto* agr = app.add_subcommand("agreement", "Human vs LLM judge agreement");
    model_opt(agr);
    table_opt(agr);

    auto* shr = app.add_subcommand("show-results", "First n judged examples per tone and model");
    model_opt(shr);
    table_opt(shr);
    shr->add_option("-n", o.n, "Examples per group");

    auto* shx = app.add_subcommand("show-examples", "Rewritten examples matching a filter");
    model_opt(shx);
    table_opt(shx);
    shx->add_option("--tone", o.tones, "Only this tone");
    shx->add_option("--rewrite-model", o.rewrite_model, "Only rewrites by this model id");
    shx->add_option("--min-score", o.min_score, "Minimum mean grade (1-3)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        Workspace ws = open_workspace(load_config(o.config), &err);
        if (gen->parsed()) return do_generate(ws, o, out, err);
        if (inf->parsed()) return do_inference(ws, o, out, err);
        if (jud->parsed()) return do_judge(ws, o, out, err);
        if (rep->parsed()) return do_report(ws, o, out, err);
        if (exp->parsed()) return do_export(ws, o, out, err);
        if (srv->parsed()) return do_serve(ws, o, out, err);
        if (imp->parsed()) return do_import(ws, o, out, err);
        if (agr->parsed()) return do_agreement(ws, o, out, err);
        if (shr->parsed()) return do_show_results(ws, o, out, err);
        if (shx->parsed()) return do_show_examples(ws, o, out, err, *shx);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace toneforge::cli
