#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace toneforge {

enum class Role { system, user, assistant };

std::string_view to_string(Role role) noexcept;
std::optional<Role> try_parse_role(std::string_view text) noexcept;

struct ChatMessage {
    Role role = Role::user;
    std::string text;

    bool operator==(const ChatMessage&) const = default;
};

// A rendered prompt ready for a backend.
struct ChatRequest {
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_tokens = 1024;
    // Name of the template this request was rendered from. Local metadata
    // used for mock routing; never sent over the wire.
    std::string template_name;

    // Text of the last user message, or empty.
    const std::string& final_user_text() const;

    bool operator==(const ChatRequest&) const = default;
};

// Throws PreconditionError if the message sequence is not
// [system] user (assistant user)*, or temperature/max_tokens are out of range.
void validate_request(const ChatRequest& request);

}  // namespace toneforge
