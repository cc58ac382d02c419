#include "toneforge/errors.hpp"

namespace toneforge {

namespace {

std::string describe_location(const std::string& file, std::size_t row, std::size_t column) {
    std::string out = file + ": row " + std::to_string(row);
    if (column != MalformedSnapshot::npos) out += ", column " + std::to_string(column);
    return out;
}

}  // namespace

MalformedSnapshot::MalformedSnapshot(std::string file, std::size_t row, std::size_t column, const std::string& what)
    : Error(describe_location(file, row, column) + ": " + what), file_(std::move(file)), row_(row), column_(column) {}

GenerationShortfall::GenerationShortfall(std::size_t obtained, std::size_t requested)
    : Error("generation shortfall: obtained " + std::to_string(obtained) + "/" + std::to_string(requested)),
      obtained_(obtained),
      requested_(requested) {}

ScoreRangeError::ScoreRangeError(long value, std::string raw)
    : ExtractionError("bracketed score " + std::to_string(value) + " is outside the allowed range", std::move(raw)),
      value_(value) {}

}  // namespace toneforge
