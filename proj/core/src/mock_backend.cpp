#include "toneforge/mock_backend.hpp"

#include <charconv>
#include <cmath>

#include "toneforge/csv.hpp"
#include "toneforge/errors.hpp"
#include "toneforge/lm_router.hpp"
#include "toneforge/text.hpp"

namespace toneforge {

namespace {

struct ExpandContext {
    const std::string& input;
    const std::string& template_name;
    const std::smatch* captures = nullptr;
    int row = 0;
};

std::string expand(std::string_view pattern, const ExpandContext& ctx) {
    std::string out;
    std::size_t i = 0;
    while (i < pattern.size()) {
        if (pattern[i] != '{') {
            out += pattern[i++];
            continue;
        }
        const std::size_t close = pattern.find('}', i);
        if (close == std::string_view::npos) {
            out.append(pattern.substr(i));
            break;
        }
        const std::string_view key = pattern.substr(i + 1, close - i - 1);
        if (key == "input") {
            out += ctx.input;
        } else if (key == "template") {
            out += ctx.template_name;
        } else if (key == "i" && ctx.row > 0) {
            out += std::to_string(ctx.row);
        } else if (key.size() == 1 && key[0] >= '1' && key[0] <= '9' && ctx.captures &&
                   static_cast<std::size_t>(key[0] - '0') < ctx.captures->size()) {
            out += (*ctx.captures)[key[0] - '0'].str();
        } else {
            out.append(pattern.substr(i, close - i + 1));
        }
        i = close + 1;
    }
    return out;
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    if (from.empty()) return s;
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

std::string csv_reply(const MockTransform& t, const ExpandContext& ctx) {
    int count = t.count;
    if (t.count_group > 0 && ctx.captures && static_cast<std::size_t>(t.count_group) < ctx.captures->size()) {
        const std::string group = (*ctx.captures)[t.count_group].str();
        std::from_chars(group.data(), group.data() + group.size(), count);
    }
    const int rows = static_cast<int>(std::floor(count * t.yield + 1e-9));

    std::string body = t.header + "\n";
    for (int i = 1; i <= rows; ++i) {
        ExpandContext row_ctx = ctx;
        row_ctx.row = i;
        const std::vector<std::string> field = {expand(t.row_template, row_ctx)};
        body += csv::format_row(field);
    }
    if (!t.wrap_in_prose) return body;
    return "Here are the examples you asked for:\n\n```csv\n" + body + "```\n\nLet me know if you need more!";
}

// splitmix64 finalizer; FNV-1a alone spreads inputs that differ only in their tail poorly.
std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t fnv1a(std::string_view data) noexcept {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

MockRuleSet::MockRuleSet(std::vector<MockRule> rules) : rules_(std::move(rules)) {
    compiled_.reserve(rules_.size());
    for (const MockRule& rule : rules_) {
        if (rule.pattern.empty()) {
            compiled_.emplace_back();
            continue;
        }
        try {
            compiled_.emplace_back(std::regex(rule.pattern, std::regex::ECMAScript));
        } catch (const std::regex_error& e) {
            throw ConfigError("bad mock rule pattern '" + rule.pattern + "': " + e.what());
        }
        if (rule.transform.kind == MockTransform::Kind::pick && rule.transform.options.empty())
            throw ConfigError("mock 'pick' rule needs options");
    }
}

std::string MockRuleSet::complete(const ChatRequest& request) const {
    const std::string& input = request.final_user_text();
    for (std::size_t r = 0; r < rules_.size(); ++r) {
        const MockRule& rule = rules_[r];
        if (!rule.template_contains.empty() && request.template_name.find(rule.template_contains) == std::string::npos)
            continue;
        std::smatch m;
        if (compiled_[r] && !std::regex_search(input, m, *compiled_[r])) continue;
        const ExpandContext ctx{input, request.template_name, compiled_[r] ? &m : nullptr};

        const MockTransform& t = rule.transform;
        switch (t.kind) {
            case MockTransform::Kind::echo:
                return input;
            case MockTransform::Kind::constant:
                return expand(t.text, ctx);
            case MockTransform::Kind::replace: {
                std::string out = input;
                for (const auto& [from, to] : t.replacements) out = replace_all(std::move(out), from, to);
                return text::collapse_whitespace(out);
            }
            case MockTransform::Kind::pick:
                return expand(t.options[mix64(fnv1a(input)) % t.options.size()], ctx);
            case MockTransform::Kind::csv_rows:
                return csv_reply(t, ctx);
            case MockTransform::Kind::fail:
                throw CompletionError(CompletionError::Kind::mock_failure,
                                      "mock failure: " + expand(t.text, ctx), 1);
        }
    }
    return input;
}

std::string mock_complete(const MockRuleSet& rules, const ChatRequest& request) { return rules.complete(request); }

}  // namespace toneforge
