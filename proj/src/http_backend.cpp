#define CPPHTTPLIB_OPENSSL_SUPPORT

#include "prp/http_backend.hpp"

#include <cstdlib>

#include "httplib.h"
#include "json.hpp"

namespace prp {
namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::move(fallback);
}

}  // namespace

HttpBackend::HttpBackend(std::string base_url, std::string api_key) {
    if (base_url.empty()) base_url = env_or("PRP_BASE_URL", "");
    if (api_key.empty()) api_key = env_or("PRP_API_KEY", "");
    if (base_url.empty())
        throw BackendError(ErrorKind::Config, "live backend requires PRP_BASE_URL");
    if (api_key.empty())
        throw BackendError(ErrorKind::Config, "live backend requires PRP_API_KEY");

    // Split "scheme://host[:port]/prefix" into client target and path prefix.
    auto scheme_end = base_url.find("://");
    std::size_t path_start =
        base_url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start == std::string::npos) {
        scheme_host_ = base_url;
    } else {
        scheme_host_ = base_url.substr(0, path_start);
        path_prefix_ = base_url.substr(path_start);
        while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    }
    api_key_ = std::move(api_key);
}

CompletionResult HttpBackend::complete(const CompletionRequest& request) {
    nlohmann::json body = {
        {"model", request.params.model_id},
        {"prompt", request.prompt},
        {"temperature", request.params.temperature},
        {"max_tokens", request.params.max_tokens},
    };

    httplib::Client client(scheme_host_);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};

    auto start = std::chrono::steady_clock::now();
    auto response = client.Post(path_prefix_ + "/completions", headers, body.dump(),
                                "application/json");
    if (!response) {
        throw BackendError(ErrorKind::Transport,
                           "transport error: " + httplib::to_string(response.error()));
    }
    if (response->status == 429)
        throw BackendError(ErrorKind::RateLimited, "429 rate limited: " + response->body);
    if (response->status == 401 || response->status == 403)
        throw BackendError(ErrorKind::Auth,
                           "auth failed (" + std::to_string(response->status) + ")");
    if (response->status >= 500)
        throw BackendError(ErrorKind::Transport,
                           "server error " + std::to_string(response->status) + ": " +
                               response->body);
    if (response->status >= 400)
        throw BackendError(ErrorKind::Provider,
                           "provider error " + std::to_string(response->status) + ": " +
                               response->body);

    nlohmann::json parsed = nlohmann::json::parse(response->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty()) {
        throw BackendError(ErrorKind::Provider,
                           "malformed completion response: " + response->body);
    }

    CompletionResult result;
    result.text = parsed["choices"][0].value("text", "");
    result.latency = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - start);
    if (parsed.contains("model")) result.provider_meta["model"] = parsed["model"].dump();
    if (parsed.contains("id")) result.provider_meta["id"] = parsed["id"].dump();
    return result;
}

}  // namespace prp
