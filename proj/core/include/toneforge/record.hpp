#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "toneforge/timestamp.hpp"
#include "toneforge/tone.hpp"
#include "toneforge/verdict.hpp"

namespace toneforge {

using RecordId = std::int64_t;

// Rubric labels for the 0-3 human scale, indexed by value.
inline constexpr std::string_view kHumanRubric[4] = {
    "This is not a rewrite.",
    "I can't use this rewrite.",
    "I would use this rewrite with minor changes.",
    "I can use this rewrite as is.",
};

struct HumanScore {
    int value = 0;
    std::string annotator_id;
    Timestamp scored_at{};

    bool operator==(const HumanScore&) const = default;
};

std::string human_score_to_json(const HumanScore& score);
HumanScore human_score_from_json(std::string_view json);

// One evaluation row. Columns are filled by successive pipeline steps.
struct ExampleRecord {
    RecordId id = 0;
    std::string source_text;
    Tone tone = Tone::professional;
    std::string synth_model;
    std::optional<std::string> rewrite_text;
    std::optional<std::string> rewrite_model;
    std::optional<JudgeVerdict> verdict;
    std::optional<HumanScore> human_score;
    Timestamp created_at{};

    bool operator==(const ExampleRecord&) const = default;
};

// Throws InvariantError describing the first violated record invariant.
void validate_record(const ExampleRecord& record);

}  // namespace toneforge
