#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "toneforge/lm_router.hpp"
#include "toneforge/tone.hpp"

namespace toneforge {

// Declarative pipeline configuration, loaded from YAML:
//
//   data_root: data
//   prompts_root: ../prompts
//   table: tones
//   default_count: 100
//   tones: [professional, witty]        # default: all nine
//   roles: {generator: gen, candidate: small, judge: big}
//   generation_prompts:                 # optional, several prompts per tone
//     professional: [generate.professional, generate.professional.workplace]
//   endpoints:
//     - id: big
//       kind: remote_chat_http          # remote_chat_http | local_server_http | mock
//       base_url: https://gateway.example.com/v1
//       model: some-large-model
//       max_concurrency: 8
//       timeout_ms: 60000
//       retry: {max_attempts: 3, base_backoff_ms: 500, jitter: 0.2}
//
// Relative paths resolve against the directory of the config file.
struct PipelineConfig {
    std::filesystem::path data_root = "data";
    std::filesystem::path prompts_root = "prompts";
    std::string table = "tones";
    int default_count = 100;
    std::vector<Tone> tones{kAllTones.begin(), kAllTones.end()};
    std::vector<EndpointConfig> endpoints;
    std::map<std::string, std::string> roles;  // generator | candidate | judge -> endpoint_id
    std::map<Tone, std::vector<std::string>> generation_prompts;

    // Non-fatal findings, e.g. judge and candidate sharing an endpoint.
    std::vector<std::string> warnings;

    // Throws ConfigError for unknown ids/roles.
    const EndpointConfig& endpoint(std::string_view endpoint_id) const;
    const EndpointConfig& role_endpoint(std::string_view role) const;

    // Prompt names for one tone; defaults to {"generate.<tone>"}.
    std::vector<std::string> prompts_for(Tone tone) const;
};

PipelineConfig parse_config(std::string_view yaml, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& file);

}  // namespace toneforge
