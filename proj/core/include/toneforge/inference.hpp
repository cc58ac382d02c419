#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "toneforge/datastore.hpp"
#include "toneforge/lm_router.hpp"
#include "toneforge/tone.hpp"
#include "toneforge/workspace.hpp"

namespace toneforge {

// Rewrite request for one source sentence from template rewrite.<tone>.
ChatRequest build_rewrite_request(const PromptRegistry& prompts, Tone tone, std::string_view source);

// The candidate's rewrite, trimmed of surrounding whitespace only.
std::string rewrite_one(const Workspace& ws, const EndpointConfig& endpoint, Tone tone,
                        std::string_view source);

struct InferenceOptions {
    std::optional<std::set<Tone>> tone_filter;
    bool force = false;  // rewrite records that already hold a rewrite
};

struct InferenceRun {
    DatasetTable table;
    std::optional<std::filesystem::path> snapshot;
    std::size_t pending = 0;
    std::size_t filled = 0;
    std::size_t other_model = 0;  // skipped: rewritten by a different model
    std::vector<RecordFailure> failures;
};

// Fills rewrite_text/rewrite_model for pending records via one batch. A forced
// rewrite clears the record's verdict and human score. Throws OrderingError on
// a table without generated rows and Error when every pending record fails.
InferenceRun run_inference(const Workspace& ws, const std::string& table_name,
                           const EndpointConfig& endpoint, const InferenceOptions& options = {});

// Per-model table name: "<base>__<endpoint_id>".
std::string model_table_name(std::string_view base, std::string_view endpoint_id);

// Makes sure `target` holds every record of `base`. Creates target from base on
// first use; later calls append base records whose ids target lacks. Returns
// the number of records added (0 means no snapshot was written).
std::size_t sync_model_table(const Workspace& ws, const std::string& base, const std::string& target);

}  // namespace toneforge
