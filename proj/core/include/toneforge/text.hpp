#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace toneforge::text {

// ASCII whitespace trim.
std::string_view trim(std::string_view s) noexcept;
std::string trim_copy(std::string_view s);

std::vector<std::string_view> split_lines(std::string_view s);

// Key used for duplicate detection: Unicode NFC, trimmed, internal runs of
// whitespace collapsed to one space. Case is preserved.
std::string dedup_key(std::string_view utf8);

// Replaces every run of ASCII whitespace by a single space and trims.
std::string collapse_whitespace(std::string_view s);

std::string to_lower_ascii(std::string_view s);

}  // namespace toneforge::text
