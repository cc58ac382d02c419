#include "test_support.hpp"

#include <httplib.h>

#include <fstream>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tfx {

namespace fs = std::filesystem;

TempDir::TempDir() {
    std::random_device rd;
    const auto tag = std::to_string(rd()) + std::to_string(rd());
    path_ = fs::temp_directory_path() / ("toneforge-test-" + tag);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

fs::path source_dir() { return TONEFORGE_SOURCE_DIR; }
fs::path prompts_dir() { return source_dir() / "prompts"; }
fs::path golden_dir() { return source_dir() / "tests" / "golden"; }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& body) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << body;
}

Timestamp at(int y, unsigned mo, unsigned d, int h, int mi, int s) {
    using namespace std::chrono;
    return sys_days{year{y} / month{mo} / day{d}} + hours{h} + minutes{mi} + seconds{s};
}

Clock ticking_clock(Timestamp start) {
    auto next = std::make_shared<std::atomic<std::int64_t>>(start.time_since_epoch().count());
    return [next] { return Timestamp{std::chrono::seconds{next->fetch_add(1)}}; };
}

EndpointConfig mock_endpoint(std::string id, std::vector<MockRule> rules, int max_concurrency) {
    EndpointConfig ep;
    ep.endpoint_id = id;
    ep.model_id = "model-" + id;
    ep.kind = EndpointKind::mock;
    ep.max_concurrency = max_concurrency;
    ep.mock_rules = std::make_shared<const MockRuleSet>(std::move(rules));
    return ep;
}

MockRule rule(std::string template_contains, std::string pattern, MockTransform transform) {
    return MockRule{std::move(template_contains), std::move(pattern), std::move(transform)};
}

MockTransform constant(std::string text) {
    MockTransform t;
    t.kind = MockTransform::Kind::constant;
    t.text = std::move(text);
    return t;
}

MockTransform fail_with(std::string text) {
    MockTransform t;
    t.kind = MockTransform::Kind::fail;
    t.text = std::move(text);
    return t;
}

MockTransform pick(std::vector<std::string> options) {
    MockTransform t;
    t.kind = MockTransform::Kind::pick;
    t.options = std::move(options);
    return t;
}

MockTransform csv_rows(int count_group, double yield, std::string row, bool prose) {
    MockTransform t;
    t.kind = MockTransform::Kind::csv_rows;
    t.count_group = count_group;
    t.yield = yield;
    t.row_template = std::move(row);
    t.wrap_in_prose = prose;
    return t;
}

Workspace make_workspace(const TempDir& dir, std::vector<EndpointConfig> endpoints,
                         std::map<std::string, std::string> roles) {
    PipelineConfig cfg;
    cfg.data_root = dir.path() / "data";
    cfg.prompts_root = prompts_dir();
    cfg.endpoints = std::move(endpoints);
    cfg.roles = std::move(roles);
    Workspace ws = open_workspace(std::move(cfg));
    ws.clock = ticking_clock(at(2025, 1, 2, 3, 4, 5));
    return ws;
}

ExampleRecord make_record(RecordId id, Tone tone, std::string source) {
    ExampleRecord r;
    r.id = id;
    r.tone = tone;
    r.source_text = std::move(source);
    r.synth_model = "gen-model";
    r.created_at = at(2025, 1, 1);
    return r;
}

ExampleRecord rewritten(ExampleRecord r, std::string rewrite, std::string model) {
    r.rewrite_text = std::move(rewrite);
    r.rewrite_model = std::move(model);
    return r;
}

DatasetTable make_table(std::string name, std::vector<ExampleRecord> records) {
    DatasetTable t;
    t.name = std::move(name);
    t.records = std::move(records);
    return t;
}

struct FakeChatServer::Impl {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    Handler handler;
    mutable std::mutex mutex;
    std::vector<Request> received;
};

FakeChatServer::FakeChatServer(Handler handler) : impl_(std::make_unique<Impl>()) {
    impl_->handler = std::move(handler);
    impl_->server.new_task_queue = [] { return new httplib::ThreadPool(64); };
    impl_->server.Post(".*", [this](const httplib::Request& req, httplib::Response& res) {
        const int index = count_.fetch_add(1);
        const int now = in_flight_.fetch_add(1) + 1;
        int peak = peak_.load();
        while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
        }
        Request captured{req.path, req.body, {}};
        for (const auto& [k, v] : req.headers) captured.headers[k] = v;
        {
            std::lock_guard lock(impl_->mutex);
            impl_->received.push_back(captured);
        }
        const Reply reply = impl_->handler(captured, index);
        if (reply.delay.count() > 0) std::this_thread::sleep_for(reply.delay);
        res.status = reply.status;
        res.set_content(reply.body, "application/json");
        in_flight_.fetch_sub(1);
    });
    impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

FakeChatServer::~FakeChatServer() {
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

std::string FakeChatServer::base_url() const { return "http://127.0.0.1:" + std::to_string(impl_->port) + "/v1"; }

std::vector<FakeChatServer::Request> FakeChatServer::received() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->received;
}

std::string FakeChatServer::completion_body(const std::string& content) {
    nlohmann::json doc = {{"id", "cmpl-1"},
                          {"object", "chat.completion"},
                          {"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}, {"finish_reason", "stop"}}}}};
    return doc.dump();
}

std::filesystem::path write_mock_config(const TempDir& dir,
                                        const std::vector<std::pair<std::string, std::string>>& edits) {
    std::string yaml = read_file(source_dir() / "config" / "mock.yaml");
    auto swap = [&](const std::string& from, const std::string& to) {
        const auto at = yaml.find(from);
        if (at == std::string::npos) throw std::runtime_error("mock.yaml lacks '" + from + "'");
        yaml.replace(at, from.size(), to);
    };
    swap("data_root: ../data", "data_root: " + (dir / "data").string());
    swap("prompts_root: ../prompts", "prompts_root: " + prompts_dir().string());
    for (const auto& [from, to] : edits) swap(from, to);
    const auto file = dir / "toneforge.yaml";
    write_file(file, yaml);
    return file;
}

DatasetTable appendix_table() {
    const std::string model = "qwen-3-1-7B";
    auto judged = [&](RecordId id, Tone tone, std::string source, std::string rewrite, std::array<int, 4> grades,
                      bool is_rewrite) {
        ExampleRecord r = rewritten(make_record(id, tone, std::move(source)), std::move(rewrite), model);
        r.verdict = make_verdict(grades, is_rewrite, "judge");
        return r;
    };
    return make_table("appendix", {
        judged(6418, Tone::casual, "I would like to make a reservation for a table near the window.",
               "Hey, sounds like you're all set for the evening! Let me know if you need help with any other details, "
               "like the number of people or any specific requests. I'll be happy to assist! [smile]",
               {2, 2, 1, 1}, false),
        judged(6499, Tone::casual, "Could you please turn on the fan?",
               "No worries, I'll turn it on for you! [thumbsup] Let me know if you need anything else.", {3, 3, 3, 3},
               false),
        judged(6520, Tone::professional, "That movie was a whole vibe, fam.",
               "I appreciate your feedback, and I'm always eager to hear different perspectives. If you'd like, we "
               "could discuss it further!",
               {2, 2, 2, 1}, false),
        judged(6550, Tone::professional, "I was feelin' myself in that outfit, bruh, no lie.",
               "I was feeling self-assured in that outfit, man, no lie.", {3, 3, 2, 2}, true),
    });
}

}  // namespace tfx
