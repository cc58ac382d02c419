#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace toneforge {

struct BracketScore {
    int score = 0;
    std::string rationale;  // trimmed text before the score group
};

// Finds the last square-bracket group whose content is only an integer
// (surrounding spaces allowed) and returns it with the preceding text.
// Other bracket groups such as "[smile]" are ignored.
//
// Throws ExtractionError when there is no integer group and ScoreRangeError
// when the last one is not in `allowed`.
BracketScore extract_bracketed_score(std::string_view judge_text,
                                     std::initializer_list<int> allowed = {1, 2, 3});

}  // namespace toneforge
