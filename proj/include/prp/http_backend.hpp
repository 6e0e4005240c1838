#pragma once

#include <string>

#include "prp/backend.hpp"

namespace prp {

/// OpenAI-compatible completions client. POSTs
/// {model, prompt, temperature, max_tokens} to {base_url}/completions and
/// reads the first choice's text. The API key comes from PRP_API_KEY and
/// the base URL from PRP_BASE_URL; neither is read from config files.
class HttpBackend : public Backend {
public:
    /// Reads PRP_BASE_URL / PRP_API_KEY when arguments are empty.
    /// Throws Config when either is missing.
    HttpBackend(std::string base_url = {}, std::string api_key = {});

    CompletionResult complete(const CompletionRequest& request) override;

private:
    std::string scheme_host_;  // e.g. "https://api.example.com"
    std::string path_prefix_;  // e.g. "/v1"
    std::string api_key_;
};

}  // namespace prp
