#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "toneforge/config.hpp"
#include "toneforge/lm_router.hpp"
#include "toneforge/prompt_registry.hpp"
#include "toneforge/record.hpp"
#include "toneforge/timestamp.hpp"

namespace toneforge {

// Everything a pipeline step needs: configuration, prompts, router, clock and
// a diagnostics sink.
struct Workspace {
    PipelineConfig config;
    PromptRegistry prompts;
    LmRouter router;
    Clock clock = system_now;
    std::ostream* diagnostics = nullptr;

    const std::filesystem::path& data_root() const noexcept { return config.data_root; }

    void warn(const std::string& message) const;
};

// Loads prompts from config.prompts_root and creates data_root if needed.
Workspace open_workspace(PipelineConfig config, std::ostream* diagnostics = nullptr);

struct RecordFailure {
    RecordId id = 0;
    std::string message;
};

}  // namespace toneforge
