#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "toneforge/chat.hpp"

namespace toneforge {

// Deterministic reply transform for offline endpoints.
//
// Text fields may contain {input} (final user message), {template} (template
// name of the request), {1}..{9} (capture groups of the rule pattern) and, for
// csv_rows, {i} (1-based row number). Unknown placeholders are left as is.
struct MockTransform {
    enum class Kind {
        echo,       // final user message
        constant,   // expanded `text`
        replace,    // final user message with `replacements` applied in order
        pick,       // options[mix(fnv1a(final user message)) % options.size()]
        csv_rows,   // CSV with `header` and floor(count * yield) rows
        fail,       // raises a non-retryable CompletionError with `text`
    };

    Kind kind = Kind::echo;
    std::string text;
    std::vector<std::pair<std::string, std::string>> replacements;
    std::vector<std::string> options;

    // csv_rows: row count from capture group `count_group` when > 0, else `count`.
    int count_group = 0;
    int count = 0;
    double yield = 1.0;
    std::string header = "text";
    std::string row_template;
    // Surround the CSV with prose and a code fence, as chat models tend to.
    bool wrap_in_prose = false;
};

struct MockRule {
    std::string template_contains;  // empty matches every request
    std::string pattern;            // ECMAScript regex searched in the final user message; empty matches all
    MockTransform transform;
};

// Compiled, immutable rule list. First matching rule wins; no match echoes the
// final user message.
class MockRuleSet {
public:
    MockRuleSet() = default;
    explicit MockRuleSet(std::vector<MockRule> rules);

    const std::vector<MockRule>& rules() const noexcept { return rules_; }

    // Pure function of (rules, request).
    std::string complete(const ChatRequest& request) const;

private:
    std::vector<MockRule> rules_;
    std::vector<std::optional<std::regex>> compiled_;
};

std::string mock_complete(const MockRuleSet& rules, const ChatRequest& request);

// 64-bit FNV-1a; stable across platforms.
std::uint64_t fnv1a(std::string_view data) noexcept;

}  // namespace toneforge
