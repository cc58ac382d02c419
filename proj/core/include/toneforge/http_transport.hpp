#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "toneforge/errors.hpp"

namespace toneforge {

struct HttpResponse {
    int status = 0;
    std::string body;
};

// Connection failure or timeout; always retryable.
class TransportError : public Error {
public:
    using Error::Error;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

class HttpTransport {
public:
    virtual ~HttpTransport() = default;

    // POSTs a JSON body to base_url + path. Throws TransportError when no HTTP
    // response was obtained.
    virtual HttpResponse post_json(const std::string& base_url, const std::string& path,
                                   const std::string& body, const HttpHeaders& headers,
                                   std::chrono::milliseconds timeout) const = 0;
};

// cpp-httplib backed transport; http:// and https://.
std::shared_ptr<const HttpTransport> make_default_transport();

}  // namespace toneforge
