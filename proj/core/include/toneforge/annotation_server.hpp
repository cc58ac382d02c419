#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "toneforge/annotation.hpp"

namespace toneforge {

// HTTP front of an AnnotationService:
//
//   GET  /api/tasks/next            next pending task, or {"done":true,...}
//   POST /api/tasks/{id}/score      {"value":0..3,"annotator_id":"..."}
//   GET  /api/progress              {"scored","pending","total"}
//   GET  /                          static UI assets
class AnnotationServer {
public:
    explicit AnnotationServer(AnnotationService& service,
                              std::optional<std::filesystem::path> assets_dir = {});
    ~AnnotationServer();

    AnnotationServer(const AnnotationServer&) = delete;
    AnnotationServer& operator=(const AnnotationServer&) = delete;

    // Returns the bound port. port 0 picks a free one.
    int bind(const std::string& host, int port);

    // Blocks until stop().
    void serve();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace toneforge
