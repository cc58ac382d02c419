#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "toneforge/chat.hpp"
#include "toneforge/errors.hpp"
#include "toneforge/http_transport.hpp"
#include "toneforge/mock_backend.hpp"

namespace toneforge {

enum class EndpointKind { remote_chat_http, local_server_http, mock };

std::string_view to_string(EndpointKind kind) noexcept;
std::optional<EndpointKind> try_parse_endpoint_kind(std::string_view text) noexcept;

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_backoff{500};
    double jitter = 0.2;  // fraction in [0, 1]
};

// Delay before retry number `retry` (1 = first retry): base * 2^(retry-1),
// shortened by up to `jitter` of itself. unit is a uniform draw in [0, 1).
std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int retry, double unit) noexcept;

struct EndpointConfig {
    std::string endpoint_id;
    EndpointKind kind = EndpointKind::mock;
    std::string base_url;  // e.g. http://127.0.0.1:11434/v1
    std::string model_id;
    int max_concurrency = 4;
    std::chrono::milliseconds request_timeout{60000};
    RetryPolicy retry;

    // Dialect knobs for chat-completions style servers.
    std::string chat_path = "/chat/completions";
    std::string response_pointer = "/choices/0/message/content";

    std::shared_ptr<const MockRuleSet> mock_rules;  // kind == mock
};

// Throws ConfigError.
void validate_endpoint(const EndpointConfig& cfg);

// TONEFORGE_TOKEN_<ENDPOINT_ID>, upper-cased, non-alphanumerics as '_'.
std::string token_env_var(std::string_view endpoint_id);

struct CompletionResult {
    std::string text;
    std::string endpoint_id;
    std::string model_id;
    std::chrono::milliseconds latency{0};
    int attempts = 1;
};

class CompletionError : public Error {
public:
    enum class Kind { transport, http_status, bad_response, mock_failure, invalid_request };

    CompletionError(Kind kind, const std::string& what, int attempts, int http_status = 0)
        : Error(what), kind_(kind), attempts_(attempts), http_status_(http_status) {}

    Kind kind() const noexcept { return kind_; }
    int attempts() const noexcept { return attempts_; }
    int http_status() const noexcept { return http_status_; }

private:
    Kind kind_;
    int attempts_;
    int http_status_;
};

// 429, 5xx retry; other non-2xx do not.
bool is_retryable_status(int status) noexcept;

struct BatchItem {
    std::optional<CompletionResult> result;
    std::optional<CompletionError> error;

    bool ok() const noexcept { return result.has_value(); }
};

// chat-completions wire format.
std::string encode_chat_request(const EndpointConfig& cfg, const ChatRequest& request);
// Throws CompletionError(bad_response) when the pointer does not resolve to a string.
std::string decode_chat_response(const EndpointConfig& cfg, std::string_view body);

// Dispatches completions to mock or HTTP backends. Stateless apart from the
// transport, so one instance can be shared across threads.
class LmRouter {
public:
    LmRouter();
    explicit LmRouter(std::shared_ptr<const HttpTransport> transport);

    // Retries transport errors, 429 and 5xx with exponential backoff.
    CompletionResult complete(const EndpointConfig& cfg, const ChatRequest& request) const;

    // Order-preserving fan-out with at most cfg.max_concurrency requests in
    // flight. Failures are reported per item.
    std::vector<BatchItem> complete_batch(const EndpointConfig& cfg,
                                          const std::vector<ChatRequest>& requests) const;

private:
    std::string complete_http(const EndpointConfig& cfg, const ChatRequest& request, int& attempts) const;

    std::shared_ptr<const HttpTransport> transport_;
};

}  // namespace toneforge
