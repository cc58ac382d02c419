#include "toneforge/workspace.hpp"

#include <ostream>

#include "toneforge/errors.hpp"

namespace toneforge {

void Workspace::warn(const std::string& message) const {
    if (diagnostics) *diagnostics << "warning: " << message << '\n';
}

Workspace open_workspace(PipelineConfig config, std::ostream* diagnostics) {
    Workspace ws;
    ws.diagnostics = diagnostics;
    std::error_code ec;
    std::filesystem::create_directories(config.data_root, ec);
    if (ec) throw StorageError("cannot create data root " + config.data_root.string() + ": " + ec.message());
    ws.prompts = PromptRegistry::load(config.prompts_root);
    ws.config = std::move(config);
    for (const std::string& w : ws.config.warnings) ws.warn(w);
    return ws;
}

}  // namespace toneforge
