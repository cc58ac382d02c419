#include "toneforge/bracket_score.hpp"

#include <algorithm>
#include <charconv>
#include <optional>

#include "toneforge/errors.hpp"
#include "toneforge/text.hpp"

namespace toneforge {

namespace {

std::optional<long> integer_content(std::string_view inside) {
    inside = text::trim(inside);
    if (inside.empty()) return std::nullopt;
    std::string_view digits = inside;
    if (digits.front() == '-' || digits.front() == '+') digits.remove_prefix(1);
    if (digits.empty() || digits.size() > 9 || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
        return std::nullopt;
    long value = 0;
    std::from_chars(digits.data(), digits.data() + digits.size(), value);
    return inside.front() == '-' ? -value : value;
}

}  // namespace

BracketScore extract_bracketed_score(std::string_view judge_text, std::initializer_list<int> allowed) {
    std::optional<long> last_value;
    std::size_t last_open = 0;
    std::size_t open = std::string_view::npos;
    for (std::size_t i = 0; i < judge_text.size(); ++i) {
        if (judge_text[i] == '[') {
            open = i;
        } else if (judge_text[i] == ']' && open != std::string_view::npos) {
            if (auto v = integer_content(judge_text.substr(open + 1, i - open - 1))) {
                last_value = v;
                last_open = open;
            }
            open = std::string_view::npos;
        }
    }
    if (!last_value) throw ExtractionError("judge reply has no bracketed integer score", std::string(judge_text));
    if (std::find(allowed.begin(), allowed.end(), *last_value) == allowed.end())
        throw ScoreRangeError(*last_value, std::string(judge_text));
    return BracketScore{static_cast<int>(*last_value), text::trim_copy(judge_text.substr(0, last_open))};
}

}  // namespace toneforge
