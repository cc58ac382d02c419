#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace toneforge {

enum class Aspect { accuracy, completeness, coherence, conciseness };

inline constexpr std::array<Aspect, 4> kAllAspects = {
    Aspect::accuracy, Aspect::completeness, Aspect::coherence, Aspect::conciseness};

std::string_view to_string(Aspect aspect) noexcept;
std::optional<Aspect> try_parse_aspect(std::string_view text) noexcept;

// One rubric grade on the 1-3 scale. grade is empty when the judge never
// produced a parseable score for this aspect.
struct AspectScore {
    Aspect aspect = Aspect::accuracy;
    std::optional<int> grade;
    std::string rationale;

    bool operator==(const AspectScore&) const = default;
};

// Aggregated judge output for one rewrite.
//
// mean_grade and normalized are derived from the stored grades and the
// rewrite-detection flag; they are never stored independently, so the
// invariants normalized == (mean - 1) * 50 and the conversation override hold
// by construction.
struct JudgeVerdict {
    std::array<AspectScore, 4> aspects{
        AspectScore{Aspect::accuracy, {}, {}}, AspectScore{Aspect::completeness, {}, {}},
        AspectScore{Aspect::coherence, {}, {}}, AspectScore{Aspect::conciseness, {}, {}}};
    // true: genuine rewrite; false: the model answered conversationally;
    // empty: the detector never returned a usable answer.
    std::optional<bool> is_rewrite;
    std::string judge_model;

    bool all_graded() const noexcept;

    // Usable for scoring: detection succeeded, and either it flagged a
    // conversation or all four aspects were graded.
    bool valid() const noexcept;

    // Arithmetic mean of the four grades, when all are present.
    std::optional<double> mean_grade() const noexcept;

    // 0-100 score; empty when !valid().
    std::optional<double> normalized() const noexcept;

    bool operator==(const JudgeVerdict&) const = default;
};

// (mean - 1) * 50, mapping [1, 3] onto [0, 100].
constexpr double normalize_mean(double mean_grade) noexcept { return (mean_grade - 1.0) * 50.0; }

// Builds a fully graded verdict. Throws InvariantError for grades outside 1-3.
JudgeVerdict make_verdict(const std::array<int, 4>& grades, bool is_rewrite, std::string judge_model = {});

// verdict_json cell codec. Parsing is strict and re-checks that any stored
// mean_grade/normalized agree with the grades.
std::string verdict_to_json(const JudgeVerdict& verdict);
JudgeVerdict verdict_from_json(std::string_view json);

}  // namespace toneforge
