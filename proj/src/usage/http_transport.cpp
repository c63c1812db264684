#include <httplib.h>

#include "tokenledger/usage/gateway.hpp"

namespace tokenledger::usage {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw TransportError("malformed URL: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

bool equals_ignore_case(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

}  // namespace

Transport make_http_transport(std::chrono::seconds timeout) {
    return [timeout](const HttpRequest& request) {
        const auto [origin, path] = split_url(request.url);
        httplib::Client client(origin);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);

        httplib::Headers headers;
        std::string content_type = "application/json";
        for (const auto& [name, value] : request.headers) {
            if (equals_ignore_case(name, "content-type")) {
                content_type = value;
            } else {
                headers.emplace(name, value);
            }
        }

        httplib::Result result = request.method == "GET"
                                     ? client.Get(path, headers)
                                     : client.Post(path, headers, request.body, content_type);
        if (!result) {
            throw TransportError(httplib::to_string(result.error()));
        }
        return HttpResponse{result->status, result->body};
    };
}

}  // namespace tokenledger::usage
