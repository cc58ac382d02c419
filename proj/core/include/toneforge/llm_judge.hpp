#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "toneforge/bracket_score.hpp"
#include "toneforge/datastore.hpp"
#include "toneforge/lm_router.hpp"
#include "toneforge/verdict.hpp"
#include "toneforge/workspace.hpp"

namespace toneforge {

// Appended to the final user message when a judge reply had no usable score.
inline constexpr std::string_view kFormatReminder =
    "\n\nReminder: end your answer with the score alone in square brackets, for example [2].";

inline constexpr std::string_view kDetectionTemplate = "judge.rewrite_detection";

// Template name for one aspect: "judge.<aspect>".
std::string aspect_template_name(Aspect aspect);

struct JudgeInput {
    Tone tone = Tone::professional;
    std::string source;
    std::string rewrite;
};

// Four judge calls (one per aspect), each retried once with kFormatReminder
// after an extraction failure. A persistent failure leaves that grade empty
// and keeps the raw reply as rationale. Router failures throw.
std::array<AspectScore, 4> judge_aspects(const Workspace& ws, const EndpointConfig& endpoint, Tone tone,
                                         std::string_view source, std::string_view rewrite);

// true: the output is a genuine rewrite ([3]); false: the model answered
// conversationally ([1]). [2] is not accepted. Throws ExtractionError after a
// failed retry.
bool detect_conversation(const Workspace& ws, const EndpointConfig& endpoint, std::string_view source,
                         std::string_view rewrite);

// Detection plus all four aspects.
JudgeVerdict judge_verdict(const Workspace& ws, const EndpointConfig& endpoint, Tone tone,
                           std::string_view source, std::string_view rewrite);

// Batch form used by run_judge: five requests per input through one
// complete_batch, then one retry batch for unparseable replies. Entries are
// empty where a router call failed; `failures` receives index-tagged messages.
std::vector<std::optional<JudgeVerdict>> judge_many(const Workspace& ws, const EndpointConfig& endpoint,
                                                    const std::vector<JudgeInput>& inputs,
                                                    std::vector<std::pair<std::size_t, std::string>>* failures);

struct JudgeOptions {
    bool force = false;  // re-judge records that already hold a verdict
};

struct JudgeRun {
    DatasetTable table;
    std::optional<std::filesystem::path> snapshot;
    std::size_t pending = 0;
    std::size_t judged = 0;
    std::size_t invalid = 0;  // stored but not usable for scoring
    std::vector<RecordFailure> failures;
};

// Fills the verdict column for rewritten records. A table without rewrites is
// a no-op (pending == 0); a missing table throws OrderingError.
JudgeRun run_judge(const Workspace& ws, const std::string& table_name, const EndpointConfig& endpoint,
                   const JudgeOptions& options = {});

}  // namespace toneforge
