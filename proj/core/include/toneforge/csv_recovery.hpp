#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "toneforge/csv.hpp"

namespace toneforge {

struct CsvDiagnostic {
    std::size_t line = 0;  // 1-based line in the raw reply
    std::string message;
};

struct CsvBlock {
    std::vector<std::string> header;  // empty when the region had no header
    std::vector<csv::Row> rows;
    std::size_t text_column = 0;
    std::vector<CsvDiagnostic> diagnostics;

    // Trimmed, non-empty values of the text column.
    std::vector<std::string> texts() const;
};

// Recovers CSV rows from free-form model output.
//
// Fence lines and prose around the table are dropped. The table starts at a
// header line (one naming a `text` column) or, failing that, at the first run of
// two consecutive comma-bearing lines. Each line is parsed on its own (quoted
// fields may continue onto following lines); malformed lines are skipped with
// a diagnostic. Throws ParseFailure only when no row survives.
CsvBlock parse_csv_block(std::string_view raw);

}  // namespace toneforge
