#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "toneforge/datastore.hpp"
#include "toneforge/tone.hpp"

namespace toneforge {

// Mean normalized score per (rewrite model, tone). Columns follow
// kReportToneOrder.
struct ToneTable {
    struct Row {
        std::string model;
        std::array<std::optional<double>, 9> cells;
        std::optional<double> average;  // over the present cells
    };
    std::vector<Row> rows;  // sorted by model

    const Row* find(const std::string& model) const;
};

// Throws Error when a table has no valid verdict at all.
ToneTable tone_table(const std::vector<DatasetTable>& tables);

// Fixed-width text rendering, one decimal place, blank for missing cells.
std::string render_tone_table(const ToneTable& table);

// Per (tone, model) group: a banner and the first n judged examples with their
// mean grade. Throws PreconditionError for n < 1.
std::string show_results(const DatasetTable& table, int n);

struct ExampleFilter {
    std::optional<Tone> tone;
    std::optional<std::string> model;
    std::optional<double> min_score;  // on the 1-3 mean-grade scale
};

// Same layout as show_results for every rewritten record passing the filter.
std::string show_examples(const DatasetTable& table, const ExampleFilter& filter = {});

}  // namespace toneforge
