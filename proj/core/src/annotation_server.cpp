#include "toneforge/annotation_server.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "toneforge/errors.hpp"

namespace toneforge {

using json = nlohmann::json;

namespace {

constexpr const char* kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>toneforge annotation</title></head>
<body>
<p>No annotation UI assets are installed. The JSON API is available under <code>/api</code>.</p>
</body></html>
)";

json progress_json(const Progress& p) {
    return {{"scored", p.scored}, {"pending", p.pending}, {"total", p.total}};
}

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
    reply(res, status, {{"error", code}, {"message", message}});
}

}  // namespace

struct AnnotationServer::Impl {
    AnnotationService& service;
    httplib::Server server;
    bool bound = false;

    explicit Impl(AnnotationService& s) : service(s) {}

    void on_next(httplib::Response& res) {
        auto view = service.next();
        if (!view) {
            reply(res, 200, {{"done", true}, {"progress", progress_json(service.progress())}});
            return;
        }
        reply(res, 200,
              {{"done", false},
               {"task_id", view->task.task_id},
               {"tone", to_string(view->task.tone)},
               {"source_text", view->task.source_text},
               {"rewrite_text", view->task.rewrite_text},
               {"position", view->position},
               {"total", view->total}});
    }

    void on_score(const httplib::Request& req, httplib::Response& res) {
        const std::string task_id = req.matches[1];
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::parse_error&) {
            reply_error(res, 400, "bad_request", "body must be a JSON object");
            return;
        }
        if (!body.is_object() || !body.contains("value") || !body["value"].is_number_integer()) {
            reply_error(res, 400, "invalid_value", "value must be an integer 0-3");
            return;
        }
        if (!body.contains("annotator_id") || !body["annotator_id"].is_string()) {
            reply_error(res, 400, "missing_annotator", "annotator_id is required");
            return;
        }
        const auto value = body["value"].get<long long>();
        if (value < 0 || value > 3) {
            reply_error(res, 400, "invalid_value", "value must be an integer 0-3");
            return;
        }
        using S = AnnotationService::SubmitStatus;
        const S status = service.submit(task_id, static_cast<int>(value), body["annotator_id"].get<std::string>());
        switch (status) {
            case S::accepted:
                reply(res, 200, {{"status", "accepted"}, {"task_id", task_id}, {"progress", progress_json(service.progress())}});
                return;
            case S::conflict:
                reply_error(res, 409, "conflict", "task " + task_id + " already has a score");
                return;
            case S::unknown_task:
                reply_error(res, 404, "unknown_task", "no task " + task_id);
                return;
            case S::invalid_value:
                reply_error(res, 400, "invalid_value", "value must be an integer 0-3");
                return;
            case S::missing_annotator:
                reply_error(res, 400, "missing_annotator", "annotator_id is required");
                return;
        }
    }
};

AnnotationServer::AnnotationServer(AnnotationService& service, std::optional<std::filesystem::path> assets_dir)
    : impl_(std::make_unique<Impl>(service)) {
    auto& srv = impl_->server;
    srv.Get("/api/tasks/next", [this](const httplib::Request&, httplib::Response& res) { impl_->on_next(res); });
    srv.Post(R"(/api/tasks/([^/]+)/score)",
             [this](const httplib::Request& req, httplib::Response& res) { impl_->on_score(req, res); });
    srv.Get("/api/progress", [this](const httplib::Request&, httplib::Response& res) {
        reply(res, 200, progress_json(impl_->service.progress()));
    });
    srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
            if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        reply_error(res, 500, "internal", message);
    });

    if (assets_dir) {
        if (!srv.set_mount_point("/", assets_dir->string()))
            throw ConfigError("assets directory " + assets_dir->string() + " does not exist");
    } else {
        srv.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(kPlaceholderPage, "text/html; charset=utf-8");
        });
    }
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind(const std::string& host, int port) {
    int bound_port = port;
    if (port == 0) {
        bound_port = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound_port = -1;
    }
    if (bound_port <= 0) throw StorageError("cannot bind " + host + ":" + std::to_string(port));
    impl_->bound = true;
    return bound_port;
}

void AnnotationServer::serve() {
    if (!impl_->bound) throw OrderingError("bind() before serve()");
    impl_->server.listen_after_bind();
}

void AnnotationServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace toneforge
