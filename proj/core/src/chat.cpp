#include "toneforge/chat.hpp"

#include <string>

#include "toneforge/errors.hpp"

namespace toneforge {

std::string_view to_string(Role role) noexcept {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "";
}

std::optional<Role> try_parse_role(std::string_view text) noexcept {
    if (text == "system") return Role::system;
    if (text == "user") return Role::user;
    if (text == "assistant") return Role::assistant;
    return std::nullopt;
}

const std::string& ChatRequest::final_user_text() const {
    static const std::string empty;
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == Role::user) return it->text;
    }
    return empty;
}

void validate_request(const ChatRequest& request) {
    if (request.messages.empty()) throw PreconditionError("chat request has no messages");
    std::size_t i = 0;
    if (request.messages.front().role == Role::system) ++i;
    if (i == request.messages.size()) throw PreconditionError("chat request has only a system message");
    for (Role expected = Role::user; i < request.messages.size(); ++i) {
        if (request.messages[i].role != expected)
            throw PreconditionError("chat roles must alternate user/assistant after the system prefix (message " +
                                    std::to_string(i) + ")");
        expected = expected == Role::user ? Role::assistant : Role::user;
    }
    if (!(request.temperature >= 0.0)) throw PreconditionError("temperature must be >= 0");
    if (request.max_tokens < 1) throw PreconditionError("max_tokens must be >= 1");
}

}  // namespace toneforge
