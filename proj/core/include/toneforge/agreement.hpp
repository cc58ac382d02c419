#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "toneforge/datastore.hpp"
#include "toneforge/verdict.hpp"

namespace toneforge {

// LLM verdict on the 0-3 human scale: 0 for a conversation, otherwise the mean
// grade rounded half up. Requires a valid verdict.
int bin_verdict(const JudgeVerdict& verdict);

// Spearman rank correlation with average ranks for ties. Empty when either
// side has zero variance or the inputs have fewer than two points.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

struct AgreementReport {
    std::size_t n = 0;
    std::optional<double> spearman_rho;  // empty: undefined (zero variance)
    double exact_match_rate = 0.0;
    double conversation_agreement = 0.0;
};

// Over records holding both a valid verdict and a human score. Throws
// AgreementError with fewer than two such records.
AgreementReport compute_agreement(const DatasetTable& table);

std::string format_agreement(const AgreementReport& report);

}  // namespace toneforge
