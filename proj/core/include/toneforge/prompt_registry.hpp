#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "toneforge/chat.hpp"

namespace toneforge {

// A versioned prompt. Only user_template carries {placeholders}; system text
// and few-shot turns are sent verbatim.
struct PromptTemplate {
    std::string name;
    int version = 1;
    std::string system_text;
    std::vector<std::pair<std::string, std::string>> few_shot;  // (user, assistant)
    std::string user_template;
    std::set<std::string> declared_vars;
    double temperature = 0.0;
    int max_tokens = 1024;
};

using RenderVars = std::map<std::string, std::string>;

// Placeholder names used in a template body. `{{` and `}}` are literal braces.
// Throws PromptError on unbalanced or malformed braces.
std::set<std::string> placeholders_in(std::string_view body);

// Parses one template file body:
//
//   ---
//   vars: text
//   temperature: 0
//   max_tokens: 512
//   ---
//   ### system
//   ...
//   ### user
//   ...
//   ### assistant
//   ...
//   ### user
//   {text}
//
// Sections must follow system, (user, assistant)*, user.
PromptTemplate parse_template(std::string_view body, std::string name, int version);

// Substitutes vars into the user template and assembles the chat turns.
// vars must name exactly the declared placeholders (RenderError otherwise).
ChatRequest render(const PromptTemplate& tmpl, const RenderVars& vars);

// Prompts loaded from <root>/<name>/<version>.txt. Immutable after load.
class PromptRegistry {
public:
    PromptRegistry() = default;

    static PromptRegistry load(const std::filesystem::path& root);

    void add(PromptTemplate tmpl);

    // Highest version when `version` is empty. Throws PromptError.
    const PromptTemplate& resolve(std::string_view name, std::optional<int> version = {}) const;

    bool contains(std::string_view name) const;
    std::vector<std::string> names() const;
    std::vector<int> versions(std::string_view name) const;

private:
    std::map<std::string, std::map<int, PromptTemplate>, std::less<>> templates_;
};

}  // namespace toneforge
