#include "toneforge/tone.hpp"

#include <string>

#include "toneforge/errors.hpp"

namespace toneforge {

namespace {

struct ToneInfo {
    std::string_view id;
    std::string_view label;
    std::string_view description;
};

constexpr ToneInfo info(Tone tone) noexcept {
    switch (tone) {
        case Tone::emojify:
            return {"emojify", "Emojify",
                    "Integrates ideographic elements to enhance textual expression while preserving semantic content"};
        case Tone::professional:
            return {"professional", "Professional", "Elevates register to suit formal business and institutional contexts"};
        case Tone::shorten:
            return {"shorten", "Shorten", "Condenses content through strategic elimination of redundancies"};
        case Tone::witty:
            return {"witty", "Witty", "Incorporates clever wordplay to enhance engagement and rhetorical appeal"};
        case Tone::casual:
            return {"casual", "Casual", "Reduces formality to achieve conversational approachability"};
        case Tone::elaborate:
            return {"elaborate", "Elaborate", "Expands content via detailed exposition and contextual enrichment"};
        case Tone::proofread:
            return {"proofread", "Proofread", "Optimizes grammatical accuracy and orthographic correctness"};
        case Tone::improve:
            return {"improve", "Improve", "Enhances overall communicative efficacy and stylistic quality"};
        case Tone::keypoints:
            return {"keypoints", "Keypoints", "Extracts essential informational elements from given content"};
    }
    return {"", "", ""};
}

}  // namespace

std::string_view to_string(Tone tone) noexcept { return info(tone).id; }
std::string_view display_name(Tone tone) noexcept { return info(tone).label; }
std::string_view describe(Tone tone) noexcept { return info(tone).description; }

std::optional<Tone> try_parse_tone(std::string_view text) noexcept {
    for (Tone tone : kAllTones) {
        if (info(tone).id == text) return tone;
    }
    return std::nullopt;
}

Tone parse_tone(std::string_view text) {
    if (auto tone = try_parse_tone(text)) return *tone;
    throw PreconditionError("unknown tone '" + std::string(text) + "'");
}

}  // namespace toneforge
