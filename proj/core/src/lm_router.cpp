#include "toneforge/lm_router.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

namespace toneforge {

using json = nlohmann::json;
using std::chrono::milliseconds;

std::string_view to_string(EndpointKind kind) noexcept {
    switch (kind) {
        case EndpointKind::remote_chat_http: return "remote_chat_http";
        case EndpointKind::local_server_http: return "local_server_http";
        case EndpointKind::mock: return "mock";
    }
    return "";
}

std::optional<EndpointKind> try_parse_endpoint_kind(std::string_view text) noexcept {
    for (EndpointKind k : {EndpointKind::remote_chat_http, EndpointKind::local_server_http, EndpointKind::mock}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

milliseconds backoff_delay(const RetryPolicy& policy, int retry, double unit) noexcept {
    const int exponent = std::clamp(retry - 1, 0, 20);
    const double base = static_cast<double>(policy.base_backoff.count()) * std::ldexp(1.0, exponent);
    const double jitter = std::clamp(policy.jitter, 0.0, 1.0) * std::clamp(unit, 0.0, 1.0);
    return milliseconds(static_cast<milliseconds::rep>(std::llround(base * (1.0 - jitter))));
}

void validate_endpoint(const EndpointConfig& cfg) {
    const std::string where = "endpoint '" + cfg.endpoint_id + "': ";
    if (cfg.endpoint_id.empty()) throw ConfigError("endpoint without id");
    if (cfg.model_id.empty()) throw ConfigError(where + "model is required");
    if (cfg.kind != EndpointKind::mock && cfg.base_url.empty()) throw ConfigError(where + "base_url is required");
    if (cfg.max_concurrency < 1) throw ConfigError(where + "max_concurrency must be >= 1");
    if (cfg.request_timeout <= milliseconds::zero()) throw ConfigError(where + "timeout must be positive");
    if (cfg.retry.max_attempts < 1) throw ConfigError(where + "retry.max_attempts must be >= 1");
    if (cfg.retry.base_backoff < milliseconds::zero()) throw ConfigError(where + "retry.base_backoff must be >= 0");
    if (!(cfg.retry.jitter >= 0.0 && cfg.retry.jitter <= 1.0)) throw ConfigError(where + "retry.jitter must be in [0, 1]");
}

std::string token_env_var(std::string_view endpoint_id) {
    std::string out = "TONEFORGE_TOKEN_";
    for (char c : endpoint_id) {
        const auto u = static_cast<unsigned char>(c);
        out += std::isalnum(u) ? static_cast<char>(std::toupper(u)) : '_';
    }
    return out;
}

bool is_retryable_status(int status) noexcept { return status == 429 || (status >= 500 && status <= 599); }

std::string encode_chat_request(const EndpointConfig& cfg, const ChatRequest& request) {
    json messages = json::array();
    for (const ChatMessage& m : request.messages) messages.push_back({{"role", to_string(m.role)}, {"content", m.text}});
    return json{{"model", cfg.model_id},
                {"messages", std::move(messages)},
                {"temperature", request.temperature},
                {"max_tokens", request.max_tokens}}
        .dump();
}

std::string decode_chat_response(const EndpointConfig& cfg, std::string_view body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error&) {
        throw CompletionError(CompletionError::Kind::bad_response, "response is not JSON", 1);
    }
    try {
        const json& content = doc.at(json::json_pointer(cfg.response_pointer));
        if (content.is_string()) return content.get<std::string>();
    } catch (const json::exception&) {
    }
    throw CompletionError(CompletionError::Kind::bad_response,
                          "response has no assistant text at " + cfg.response_pointer, 1);
}

LmRouter::LmRouter() : transport_(make_default_transport()) {}
LmRouter::LmRouter(std::shared_ptr<const HttpTransport> transport) : transport_(std::move(transport)) {}

std::string LmRouter::complete_http(const EndpointConfig& cfg, const ChatRequest& request, int& attempts) const {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    HttpHeaders headers;
    if (const char* token = std::getenv(token_env_var(cfg.endpoint_id).c_str()); token && *token)
        headers.emplace_back("Authorization", std::string("Bearer ") + token);
    const std::string body = encode_chat_request(cfg, request);

    for (attempts = 1;; ++attempts) {
        const bool last = attempts >= cfg.retry.max_attempts;
        try {
            const HttpResponse res = transport_->post_json(cfg.base_url, cfg.chat_path, body, headers, cfg.request_timeout);
            if (res.status >= 200 && res.status < 300) {
                try {
                    return decode_chat_response(cfg, res.body);
                } catch (const CompletionError& e) {
                    throw CompletionError(e.kind(), cfg.endpoint_id + ": " + e.what(), attempts);
                }
            }
            if (!is_retryable_status(res.status) || last)
                throw CompletionError(CompletionError::Kind::http_status,
                                      cfg.endpoint_id + ": HTTP " + std::to_string(res.status) + " after " +
                                          std::to_string(attempts) + " attempt(s)",
                                      attempts, res.status);
        } catch (const TransportError& e) {
            if (last)
                throw CompletionError(CompletionError::Kind::transport,
                                      cfg.endpoint_id + ": " + e.what() + " (gave up after " + std::to_string(attempts) +
                                          " attempt(s))",
                                      attempts);
        }
        std::this_thread::sleep_for(backoff_delay(cfg.retry, attempts, unit(rng)));
    }
}

CompletionResult LmRouter::complete(const EndpointConfig& cfg, const ChatRequest& request) const {
    try {
        validate_request(request);
    } catch (const PreconditionError& e) {
        throw CompletionError(CompletionError::Kind::invalid_request, e.what(), 0);
    }
    const auto start = std::chrono::steady_clock::now();
    CompletionResult result;
    result.endpoint_id = cfg.endpoint_id;
    result.model_id = cfg.model_id;
    if (cfg.kind == EndpointKind::mock) {
        result.text = cfg.mock_rules ? cfg.mock_rules->complete(request) : request.final_user_text();
        result.attempts = 1;
    } else {
        result.text = complete_http(cfg, request, result.attempts);
    }
    result.latency = std::chrono::duration_cast<milliseconds>(std::chrono::steady_clock::now() - start);
    return result;
}

std::vector<BatchItem> LmRouter::complete_batch(const EndpointConfig& cfg, const std::vector<ChatRequest>& requests) const {
    std::vector<BatchItem> out(requests.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < requests.size(); i = next++) {
            try {
                out[i].result = complete(cfg, requests[i]);
            } catch (const CompletionError& e) {
                out[i].error = e;
            } catch (const std::exception& e) {
                out[i].error = CompletionError(CompletionError::Kind::bad_response, e.what(), 1);
            }
        }
    };

    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.max_concurrency, 1)), requests.size());
    if (workers <= 1) {
        worker();
        return out;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    pool.clear();
    return out;
}

}  // namespace toneforge
