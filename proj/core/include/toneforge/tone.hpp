#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace toneforge {

// The closed set of rewrite instructions.
enum class Tone {
    emojify,
    professional,
    shorten,
    witty,
    casual,
    elaborate,
    proofread,
    improve,
    keypoints,
};

inline constexpr std::array<Tone, 9> kAllTones = {
    Tone::emojify, Tone::professional, Tone::shorten, Tone::witty, Tone::casual,
    Tone::elaborate, Tone::proofread, Tone::improve, Tone::keypoints,
};

// Column order used by the score table.
inline constexpr std::array<Tone, 9> kReportToneOrder = {
    Tone::emojify, Tone::shorten, Tone::professional, Tone::witty, Tone::casual,
    Tone::elaborate, Tone::improve, Tone::keypoints, Tone::proofread,
};

std::string_view to_string(Tone tone) noexcept;

// Display label, e.g. "Professional".
std::string_view display_name(Tone tone) noexcept;

// One-line description of what the rewrite should achieve.
std::string_view describe(Tone tone) noexcept;

std::optional<Tone> try_parse_tone(std::string_view text) noexcept;

// Throws PreconditionError on unknown values.
Tone parse_tone(std::string_view text);

}  // namespace toneforge
