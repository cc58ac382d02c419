#include "toneforge/prompt_registry.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "toneforge/errors.hpp"
#include "toneforge/text.hpp"

namespace toneforge {

namespace fs = std::filesystem;

namespace {

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

// Walks a template body, calling on_literal for literal text and on_var for
// each placeholder name.
template <typename Literal, typename Var>
void scan_placeholders(std::string_view body, Literal&& on_literal, Var&& on_var) {
    std::size_t i = 0;
    while (i < body.size()) {
        const char c = body[i];
        if (c == '{') {
            if (i + 1 < body.size() && body[i + 1] == '{') {
                on_literal('{');
                i += 2;
                continue;
            }
            std::size_t j = i + 1;
            if (j >= body.size() || !ident_start(body[j]))
                throw PromptError("malformed placeholder at offset " + std::to_string(i) + " (use {{ for a literal brace)");
            while (j < body.size() && ident_char(body[j])) ++j;
            if (j >= body.size() || body[j] != '}')
                throw PromptError("unterminated placeholder at offset " + std::to_string(i));
            on_var(body.substr(i + 1, j - i - 1));
            i = j + 1;
        } else if (c == '}') {
            if (i + 1 < body.size() && body[i + 1] == '}') {
                on_literal('}');
                i += 2;
                continue;
            }
            throw PromptError("unmatched '}' at offset " + std::to_string(i) + " (use }} for a literal brace)");
        } else {
            on_literal(c);
            ++i;
        }
    }
}

std::string join_section(const std::vector<std::string_view>& lines) {
    std::size_t begin = 0, end = lines.size();
    while (begin < end && text::trim(lines[begin]).empty()) ++begin;
    while (end > begin && text::trim(lines[end - 1]).empty()) --end;
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (i > begin) out += '\n';
        out += lines[i];
    }
    return out;
}

template <typename T>
T parse_number(std::string_view value, const std::string& what) {
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) throw PromptError("bad " + what + " '" + std::string(value) + "'");
    return out;
}

}  // namespace

std::set<std::string> placeholders_in(std::string_view body) {
    std::set<std::string> names;
    scan_placeholders(body, [](char) {}, [&](std::string_view name) { names.emplace(name); });
    return names;
}

PromptTemplate parse_template(std::string_view body, std::string name, int version) {
    PromptTemplate tmpl;
    tmpl.name = std::move(name);
    tmpl.version = version;
    const std::string label = tmpl.name + " v" + std::to_string(version);

    std::vector<std::string_view> lines = text::split_lines(body);
    std::size_t i = 0;
    bool vars_declared = false;
    if (!lines.empty() && text::trim(lines[0]) == "---") {
        for (i = 1; i < lines.size() && text::trim(lines[i]) != "---"; ++i) {
            const std::string_view line = text::trim(lines[i]);
            if (line.empty() || line.front() == '#') continue;
            const std::size_t colon = line.find(':');
            if (colon == std::string_view::npos) throw PromptError(label + ": front matter line without ':'");
            const std::string_view key = text::trim(line.substr(0, colon));
            const std::string_view value = text::trim(line.substr(colon + 1));
            if (key == "vars") {
                vars_declared = true;
                std::size_t start = 0;
                while (start <= value.size()) {
                    std::size_t comma = value.find(',', start);
                    if (comma == std::string_view::npos) comma = value.size();
                    const std::string_view var = text::trim(value.substr(start, comma - start));
                    if (!var.empty()) tmpl.declared_vars.emplace(var);
                    start = comma + 1;
                }
            } else if (key == "temperature") {
                tmpl.temperature = parse_number<double>(value, "temperature");
            } else if (key == "max_tokens") {
                tmpl.max_tokens = parse_number<int>(value, "max_tokens");
            } else if (key != "description") {
                throw PromptError(label + ": unknown front matter key '" + std::string(key) + "'");
            }
        }
        if (i == lines.size()) throw PromptError(label + ": unterminated front matter");
        ++i;
    }

    struct Section {
        Role role;
        std::vector<std::string_view> lines;
    };
    std::vector<Section> sections;
    for (; i < lines.size(); ++i) {
        const std::string_view line = lines[i];
        if (line.starts_with("### ")) {
            auto role = try_parse_role(text::trim(line.substr(4)));
            if (!role) throw PromptError(label + ": unknown section '" + std::string(line) + "'");
            sections.push_back({*role, {}});
        } else if (sections.empty()) {
            if (!text::trim(line).empty()) throw PromptError(label + ": text before the first section");
        } else {
            sections.back().lines.push_back(line);
        }
    }

    if (sections.size() < 2 || sections.front().role != Role::system || sections.size() % 2 != 0)
        throw PromptError(label + ": sections must be system, (user, assistant)*, user");
    for (std::size_t s = 1; s < sections.size(); ++s) {
        const Role expected = s % 2 == 1 ? Role::user : Role::assistant;
        if (sections[s].role != expected) throw PromptError(label + ": sections must be system, (user, assistant)*, user");
    }

    tmpl.system_text = join_section(sections.front().lines);
    for (std::size_t s = 1; s + 1 < sections.size(); s += 2)
        tmpl.few_shot.emplace_back(join_section(sections[s].lines), join_section(sections[s + 1].lines));
    tmpl.user_template = join_section(sections.back().lines);

    const std::set<std::string> used = placeholders_in(tmpl.user_template);
    if (!vars_declared) tmpl.declared_vars = used;
    if (used != tmpl.declared_vars) throw PromptError(label + ": declared vars do not match the placeholders in the user template");
    if (tmpl.max_tokens < 1 || tmpl.temperature < 0.0) throw PromptError(label + ": bad sampling parameters");
    return tmpl;
}

ChatRequest render(const PromptTemplate& tmpl, const RenderVars& vars) {
    for (const std::string& var : tmpl.declared_vars) {
        if (!vars.contains(var)) throw RenderError(var, tmpl.name + ": missing variable '" + var + "'");
    }
    for (const auto& [key, _] : vars) {
        if (!tmpl.declared_vars.contains(key)) throw RenderError(key, tmpl.name + ": unexpected variable '" + key + "'");
    }

    std::string user;
    scan_placeholders(
        tmpl.user_template, [&](char c) { user += c; }, [&](std::string_view name) { user += vars.at(std::string(name)); });

    ChatRequest req;
    req.template_name = tmpl.name;
    req.temperature = tmpl.temperature;
    req.max_tokens = tmpl.max_tokens;
    req.messages.push_back({Role::system, tmpl.system_text});
    for (const auto& [u, a] : tmpl.few_shot) {
        req.messages.push_back({Role::user, u});
        req.messages.push_back({Role::assistant, a});
    }
    req.messages.push_back({Role::user, std::move(user)});
    return req;
}

PromptRegistry PromptRegistry::load(const fs::path& root) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw PromptError("prompt directory not found: " + root.string());
    PromptRegistry registry;
    for (const fs::directory_entry& dir : fs::directory_iterator(root)) {
        if (!dir.is_directory()) continue;
        const std::string name = dir.path().filename().string();
        for (const fs::directory_entry& file : fs::directory_iterator(dir.path())) {
            if (!file.is_regular_file() || file.path().extension() != ".txt") continue;
            const std::string stem = file.path().stem().string();
            int version = 0;
            auto [ptr, err] = std::from_chars(stem.data(), stem.data() + stem.size(), version);
            if (err != std::errc{} || ptr != stem.data() + stem.size() || version < 1)
                throw PromptError("prompt file name must be <version>.txt: " + file.path().string());
            std::ifstream in(file.path(), std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            registry.add(parse_template(ss.str(), name, version));
        }
    }
    return registry;
}

void PromptRegistry::add(PromptTemplate tmpl) {
    if (tmpl.version < 1) throw PromptError(tmpl.name + ": version must be >= 1");
    auto& versions = templates_[tmpl.name];
    const int version = tmpl.version;
    if (!versions.emplace(version, std::move(tmpl)).second) throw PromptError("duplicate prompt version");
}

const PromptTemplate& PromptRegistry::resolve(std::string_view name, std::optional<int> version) const {
    auto it = templates_.find(name);
    if (it == templates_.end() || it->second.empty()) throw PromptError("unknown prompt '" + std::string(name) + "'");
    if (!version) return it->second.rbegin()->second;
    auto v = it->second.find(*version);
    if (v == it->second.end())
        throw PromptError("unknown version " + std::to_string(*version) + " of prompt '" + std::string(name) + "'");
    return v->second;
}

bool PromptRegistry::contains(std::string_view name) const { return templates_.find(name) != templates_.end(); }

std::vector<std::string> PromptRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : templates_) out.push_back(name);
    return out;
}

std::vector<int> PromptRegistry::versions(std::string_view name) const {
    std::vector<int> out;
    if (auto it = templates_.find(name); it != templates_.end()) {
        for (const auto& [v, _] : it->second) out.push_back(v);
    }
    return out;
}

}  // namespace toneforge
