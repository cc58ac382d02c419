#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace toneforge {

// UTC, second resolution.
using Timestamp = std::chrono::sys_seconds;
using Clock = std::function<Timestamp()>;

Timestamp system_now();

// 20250102T030405Z
std::string format_basic(Timestamp t);
// 2025-01-02T03:04:05Z
std::string format_extended(Timestamp t);

std::optional<Timestamp> parse_basic(std::string_view text);
std::optional<Timestamp> parse_extended(std::string_view text);

}  // namespace toneforge
