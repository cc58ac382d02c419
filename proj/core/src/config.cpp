#include "toneforge/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "toneforge/datastore.hpp"
#include "toneforge/errors.hpp"

namespace toneforge {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) {
    const YAML::Mark mark = node.Mark();
    if (mark.line >= 0) throw ConfigError("line " + std::to_string(mark.line + 1) + ": " + message);
    throw ConfigError(message);
}

void check_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!map.IsMap()) fail(map, where + " must be a mapping");
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail(kv.first, "unknown key '" + key + "' in " + where);
    }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& what) {
    if (!node.IsScalar()) fail(node, what + " must be a scalar");
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        fail(node, "bad value for " + what);
    }
}

std::vector<std::string> string_list(const YAML::Node& node, const std::string& what) {
    if (node.IsScalar()) return {node.as<std::string>()};
    if (!node.IsSequence()) fail(node, what + " must be a list");
    std::vector<std::string> out;
    for (const auto& item : node) out.push_back(scalar<std::string>(item, what));
    return out;
}

Tone tone_of(const YAML::Node& node) {
    const auto name = scalar<std::string>(node, "tone");
    auto tone = try_parse_tone(name);
    if (!tone) fail(node, "unknown tone '" + name + "'");
    return *tone;
}

MockTransform::Kind transform_kind(const YAML::Node& node) {
    using K = MockTransform::Kind;
    const auto name = scalar<std::string>(node, "reply");
    if (name == "echo") return K::echo;
    if (name == "constant") return K::constant;
    if (name == "replace") return K::replace;
    if (name == "pick") return K::pick;
    if (name == "csv_rows") return K::csv_rows;
    if (name == "fail") return K::fail;
    fail(node, "unknown mock reply kind '" + name + "'");
}

MockRule parse_rule(const YAML::Node& node) {
    check_keys(node,
               {"template", "pattern", "reply", "text", "replacements", "options", "count_group", "count", "yield",
                "header", "row", "wrap_in_prose"},
               "mock rule");
    MockRule rule;
    if (node["template"]) rule.template_contains = scalar<std::string>(node["template"], "template");
    if (node["pattern"]) rule.pattern = scalar<std::string>(node["pattern"], "pattern");
    MockTransform& t = rule.transform;
    if (node["reply"]) t.kind = transform_kind(node["reply"]);
    if (node["text"]) t.text = scalar<std::string>(node["text"], "text");
    if (const auto& r = node["replacements"]) {
        if (!r.IsSequence()) fail(r, "replacements must be a list of [from, to] pairs");
        for (const auto& pair : r) {
            if (!pair.IsSequence() || pair.size() != 2) fail(pair, "replacement must be a [from, to] pair");
            t.replacements.emplace_back(scalar<std::string>(pair[0], "from"), scalar<std::string>(pair[1], "to"));
        }
    }
    if (node["options"]) t.options = string_list(node["options"], "options");
    if (node["count_group"]) t.count_group = scalar<int>(node["count_group"], "count_group");
    if (node["count"]) t.count = scalar<int>(node["count"], "count");
    if (node["yield"]) t.yield = scalar<double>(node["yield"], "yield");
    if (node["header"]) t.header = scalar<std::string>(node["header"], "header");
    if (node["row"]) t.row_template = scalar<std::string>(node["row"], "row");
    if (node["wrap_in_prose"]) t.wrap_in_prose = scalar<bool>(node["wrap_in_prose"], "wrap_in_prose");

    if (t.kind == MockTransform::Kind::pick && t.options.empty()) fail(node, "pick reply needs options");
    if (t.yield < 0.0 || t.yield > 1.0) fail(node, "yield must be within [0, 1]");
    if (t.count_group < 0 || t.count_group > 9) fail(node, "count_group must be within 0-9");
    return rule;
}

EndpointConfig parse_endpoint(const YAML::Node& node) {
    check_keys(node,
               {"id", "kind", "base_url", "model", "max_concurrency", "timeout_ms", "retry", "chat_path",
                "response_pointer", "mock"},
               "endpoint");
    EndpointConfig ep;
    if (!node["id"]) fail(node, "endpoint without id");
    ep.endpoint_id = scalar<std::string>(node["id"], "id");
    if (node["kind"]) {
        const auto kind = scalar<std::string>(node["kind"], "kind");
        auto parsed = try_parse_endpoint_kind(kind);
        if (!parsed) fail(node["kind"], "unknown endpoint kind '" + kind + "'");
        ep.kind = *parsed;
    }
    if (node["base_url"]) ep.base_url = scalar<std::string>(node["base_url"], "base_url");
    if (node["model"]) ep.model_id = scalar<std::string>(node["model"], "model");
    if (node["max_concurrency"]) ep.max_concurrency = scalar<int>(node["max_concurrency"], "max_concurrency");
    if (node["timeout_ms"]) ep.request_timeout = std::chrono::milliseconds(scalar<long long>(node["timeout_ms"], "timeout_ms"));
    if (node["chat_path"]) ep.chat_path = scalar<std::string>(node["chat_path"], "chat_path");
    if (node["response_pointer"]) ep.response_pointer = scalar<std::string>(node["response_pointer"], "response_pointer");
    if (const auto& r = node["retry"]) {
        check_keys(r, {"max_attempts", "base_backoff_ms", "jitter"}, "retry");
        if (r["max_attempts"]) ep.retry.max_attempts = scalar<int>(r["max_attempts"], "max_attempts");
        if (r["base_backoff_ms"]) ep.retry.base_backoff = std::chrono::milliseconds(scalar<long long>(r["base_backoff_ms"], "base_backoff_ms"));
        if (r["jitter"]) ep.retry.jitter = scalar<double>(r["jitter"], "jitter");
    }
    if (const auto& m = node["mock"]) {
        if (ep.kind != EndpointKind::mock) fail(m, "mock rules on a non-mock endpoint");
        if (!m.IsSequence()) fail(m, "mock must be a list of rules");
        std::vector<MockRule> rules;
        for (const auto& rule : m) rules.push_back(parse_rule(rule));
        try {
            ep.mock_rules = std::make_shared<const MockRuleSet>(std::move(rules));
        } catch (const std::regex_error& e) {
            fail(m, std::string("bad mock pattern: ") + e.what());
        }
    }
    if (ep.model_id.empty() && ep.kind == EndpointKind::mock) ep.model_id = ep.endpoint_id;
    try {
        validate_endpoint(ep);
    } catch (const Error& e) {
        fail(node, e.what());
    }
    return ep;
}

fs::path resolve(const fs::path& p, const fs::path& base) { return p.is_absolute() ? p : (base / p).lexically_normal(); }

}  // namespace

const EndpointConfig& PipelineConfig::endpoint(std::string_view endpoint_id) const {
    for (const EndpointConfig& ep : endpoints) {
        if (ep.endpoint_id == endpoint_id) return ep;
    }
    throw ConfigError("unknown endpoint '" + std::string(endpoint_id) + "'");
}

const EndpointConfig& PipelineConfig::role_endpoint(std::string_view role) const {
    auto it = roles.find(std::string(role));
    if (it == roles.end()) throw ConfigError("no endpoint assigned to role '" + std::string(role) + "'");
    return endpoint(it->second);
}

std::vector<std::string> PipelineConfig::prompts_for(Tone tone) const {
    if (auto it = generation_prompts.find(tone); it != generation_prompts.end() && !it->second.empty()) return it->second;
    return {"generate." + std::string(to_string(tone))};
}

PipelineConfig parse_config(std::string_view yaml, const fs::path& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("invalid YAML: ") + e.what());
    }
    PipelineConfig cfg;
    if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    check_keys(root, {"data_root", "prompts_root", "table", "default_count", "tones", "roles", "generation_prompts", "endpoints"},
               "config");

    if (root["data_root"]) cfg.data_root = scalar<std::string>(root["data_root"], "data_root");
    if (root["prompts_root"]) cfg.prompts_root = scalar<std::string>(root["prompts_root"], "prompts_root");
    cfg.data_root = resolve(cfg.data_root, base_dir);
    cfg.prompts_root = resolve(cfg.prompts_root, base_dir);
    if (root["table"]) cfg.table = scalar<std::string>(root["table"], "table");
    if (!valid_table_name(cfg.table)) fail(root["table"], "invalid table name '" + cfg.table + "'");
    if (root["default_count"]) cfg.default_count = scalar<int>(root["default_count"], "default_count");
    if (cfg.default_count < 1) throw ConfigError("default_count must be positive");

    if (const auto& tones = root["tones"]) {
        if (!tones.IsSequence() || tones.size() == 0) fail(tones, "tones must be a non-empty list");
        cfg.tones.clear();
        for (const auto& t : tones) {
            const Tone tone = tone_of(t);
            if (std::find(cfg.tones.begin(), cfg.tones.end(), tone) != cfg.tones.end()) fail(t, "tone listed twice");
            cfg.tones.push_back(tone);
        }
    }

    if (const auto& eps = root["endpoints"]) {
        if (!eps.IsSequence()) fail(eps, "endpoints must be a list");
        std::set<std::string> ids;
        for (const auto& e : eps) {
            cfg.endpoints.push_back(parse_endpoint(e));
            if (!ids.insert(cfg.endpoints.back().endpoint_id).second) fail(e, "duplicate endpoint id '" + cfg.endpoints.back().endpoint_id + "'");
        }
    }

    if (const auto& roles = root["roles"]) {
        check_keys(roles, {"generator", "candidate", "judge"}, "roles");
        for (const auto& kv : roles) {
            const auto role = kv.first.as<std::string>();
            const auto id = scalar<std::string>(kv.second, role);
            try {
                (void)cfg.endpoint(id);
            } catch (const ConfigError&) {
                fail(kv.second, "role " + role + " names unknown endpoint '" + id + "'");
            }
            cfg.roles.emplace(role, id);
        }
    }

    if (const auto& gp = root["generation_prompts"]) {
        if (!gp.IsMap()) fail(gp, "generation_prompts must map tones to prompt names");
        for (const auto& kv : gp) cfg.generation_prompts[tone_of(kv.first)] = string_list(kv.second, "generation_prompts");
    }

    auto judge = cfg.roles.find("judge");
    auto candidate = cfg.roles.find("candidate");
    if (judge != cfg.roles.end() && candidate != cfg.roles.end()) {
        if (judge->second == candidate->second) {
            cfg.warnings.push_back("judge and candidate share endpoint '" + judge->second + "'; scores may be biased");
        } else if (cfg.endpoint(judge->second).model_id == cfg.endpoint(candidate->second).model_id) {
            cfg.warnings.push_back("judge and candidate use the same model '" + cfg.endpoint(judge->second).model_id +
                                   "'; scores may be biased");
        }
    }
    return cfg;
}

PipelineConfig load_config(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + file.string());
    std::ostringstream body;
    body << in.rdbuf();
    fs::path base = file.parent_path();
    if (base.empty()) base = ".";
    return parse_config(body.str(), fs::absolute(base));
}

}  // namespace toneforge
