#include "toneforge/http_transport.hpp"

#include <httplib.h>

namespace toneforge {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path prefix without trailing '/'
};

SplitUrl split_url(const std::string& url) {
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw TransportError("base_url lacks a scheme: " + url);
    const std::size_t path_start = url.find('/', scheme_end + 3);
    SplitUrl out;
    out.origin = url.substr(0, path_start);
    if (path_start != std::string::npos) out.prefix = url.substr(path_start);
    while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
    return out;
}

class HttplibTransport final : public HttpTransport {
public:
    HttpResponse post_json(const std::string& base_url, const std::string& path, const std::string& body,
                           const HttpHeaders& headers, std::chrono::milliseconds timeout) const override {
        const SplitUrl url = split_url(base_url);
        httplib::Client client(url.origin);
        if (!client.is_valid()) throw TransportError("unsupported base_url: " + base_url);
        const auto sec = std::chrono::duration_cast<std::chrono::seconds>(timeout);
        const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(timeout - sec);
        client.set_connection_timeout(sec.count(), usec.count());
        client.set_read_timeout(sec.count(), usec.count());
        client.set_write_timeout(sec.count(), usec.count());

        httplib::Headers h;
        for (const auto& [k, v] : headers) h.emplace(k, v);
        httplib::Result res = client.Post(url.prefix + path, h, body, "application/json");
        if (!res) throw TransportError("POST " + base_url + path + " failed: " + httplib::to_string(res.error()));
        return HttpResponse{res->status, res->body};
    }
};

}  // namespace

std::shared_ptr<const HttpTransport> make_default_transport() { return std::make_shared<HttplibTransport>(); }

}  // namespace toneforge
