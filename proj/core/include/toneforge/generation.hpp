#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "toneforge/csv_recovery.hpp"
#include "toneforge/datastore.hpp"
#include "toneforge/tone.hpp"
#include "toneforge/workspace.hpp"

namespace toneforge {

inline constexpr int kMaxRequestedCount = 1000;
// Fraction of requested_count a generation must reach to be accepted.
inline constexpr double kMinYieldFraction = 0.5;

struct GenerationSpec {
    Tone tone = Tone::professional;
    int requested_count = 100;
    std::string generator_endpoint;
    // Several prompts yield a more heterogeneous set; the count is split
    // across them and the replies concatenated before dedup.
    std::vector<std::string> prompt_names;
};

struct GeneratedExamples {
    std::vector<std::string> sentences;  // deduplicated, at most requested_count
    std::string synth_model;
    int asks = 0;  // completions issued, including the re-ask
    std::vector<CsvDiagnostic> diagnostics;
};

// Asks the generator for CSV, recovers and deduplicates the rows. Below
// kMinYieldFraction the deficit is re-asked once before failing with
// GenerationShortfall; a reply with no rows at all fails with ParseFailure.
GeneratedExamples generate_examples(const Workspace& ws, const GenerationSpec& spec);

struct ToneYield {
    Tone tone = Tone::professional;
    int requested = 0;
    std::size_t obtained = 0;  // rows written for this tone
    std::optional<std::string> error;
};

struct GenerationRun {
    DatasetTable table;
    std::optional<std::filesystem::path> snapshot;
    std::vector<ToneYield> yields;

    bool all_succeeded() const noexcept;
};

// Generates every spec (concurrently) and appends the results to the latest
// snapshot of table_name (or an empty table). Tones that fail are reported in
// yields; the rest are committed in one new snapshot.
GenerationRun run_generation(const Workspace& ws, const std::string& table_name,
                             const std::vector<GenerationSpec>& specs);

}  // namespace toneforge
