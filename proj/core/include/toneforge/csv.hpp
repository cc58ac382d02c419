#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace toneforge::csv {

using Row = std::vector<std::string>;

// RFC-4180 quoting: a field is quoted iff it contains a comma, a double quote,
// CR or LF. Rows end with '\n'.
std::string format_row(std::span<const std::string> fields);

struct ParsedRow {
    Row fields;
    std::size_t line = 0;  // 1-based physical line where the row starts
};

struct StrictError {
    std::size_t line = 0;
    std::size_t column = 0;  // 0-based field index
    std::string message;
};

// Strict whole-document parse. Accepts LF or CRLF record separators; quoted
// fields may span lines. Returns the first violation on failure.
struct StrictResult {
    std::vector<ParsedRow> rows;
    std::optional<StrictError> error;
};
StrictResult parse_strict(std::string_view text);

// Parses exactly one record from a single logical line (which may contain
// embedded newlines inside quotes). Empty optional if the text is not a
// well-formed record.
std::optional<Row> parse_record(std::string_view text);

}  // namespace toneforge::csv
