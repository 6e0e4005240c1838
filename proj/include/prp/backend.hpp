#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prp/rng.hpp"

namespace prp {

struct BackendParams {
    double temperature = 0.0;
    int max_tokens = 512;
    std::string model_id = "default";
};

struct CompletionRequest {
    std::string prompt;
    BackendParams params;
    std::uint64_t sample_seed = 0;  // honored by the simulator, advisory elsewhere
};

struct CompletionResult {
    std::string text;
    bool cached = false;
    std::chrono::microseconds latency{0};
    std::map<std::string, std::string> provider_meta;
};

enum class ErrorKind {
    Transport,         // retryable
    RateLimited,       // retryable with backoff
    Auth,              // fatal
    Provider,          // fatal, carries body
    FixtureMiss,       // scripted backend: no entry matched
    RetriesExhausted,  // wraps the last retryable error
    Config,
};

class BackendError : public std::runtime_error {
public:
    BackendError(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }
    bool retryable() const {
        return kind_ == ErrorKind::Transport || kind_ == ErrorKind::RateLimited;
    }

private:
    ErrorKind kind_;
};

/// Uniform completion interface. Implementations must be safe for
/// arbitrary concurrent callers.
class Backend {
public:
    virtual ~Backend() = default;
    virtual CompletionResult complete(const CompletionRequest& request) = 0;
};

// ---------------------------------------------------------------------------
// Scripted replay

/// Lowercases, trims, and collapses whitespace runs; fixture matching uses
/// this form so that recorded transcripts with cosmetic casing or spacing
/// variations still match the canonical templates.
std::string normalize_prompt(std::string_view text);

enum class MatchType { Equals, Prefix, Contains };

struct FixtureEntry {
    MatchType match = MatchType::Contains;
    std::string text;   // compared in normalized form
    std::string reply;  // verbatim completion
};

struct ScriptedFixture {
    std::vector<FixtureEntry> entries;
    bool strict = true;
};

/// Replays canned completions. Matching is content-based: the first
/// unconsumed entry whose pattern matches wins, so duplicate prompts get
/// their replies in script order. In strict mode every entry must be
/// consumed exactly once per run.
class ScriptedBackend : public Backend {
public:
    explicit ScriptedBackend(ScriptedFixture fixture);

    CompletionResult complete(const CompletionRequest& request) override;

    std::size_t consumed_count() const;
    /// Throws in strict mode if entries are left over.
    void check_all_consumed() const;

private:
    mutable std::mutex mutex_;
    ScriptedFixture fixture_;
    std::vector<bool> consumed_;
};

// ---------------------------------------------------------------------------
// Retry

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_delay{100};
    double multiplier = 2.0;
};

/// Retries retryable errors with exponential backoff and full jitter;
/// fatal errors pass through on first occurrence. `attempts_out`, when
/// given, receives the number of attempts made.
CompletionResult with_retry(Backend& backend, const CompletionRequest& request,
                            const RetryPolicy& policy, RngStream& jitter_rng,
                            int* attempts_out = nullptr);

class RetryBackend : public Backend {
public:
    RetryBackend(std::shared_ptr<Backend> inner, RetryPolicy policy, std::uint64_t jitter_seed = 0)
        : inner_(std::move(inner)), policy_(policy), rng_(jitter_seed) {}

    CompletionResult complete(const CompletionRequest& request) override;

private:
    std::shared_ptr<Backend> inner_;
    RetryPolicy policy_;
    std::mutex mutex_;
    RngStream rng_;
};

// ---------------------------------------------------------------------------
// Disk cache

/// Content-addressed on-disk completion cache, one JSON file per entry:
/// {request_digest, prompt, text, created_at}. Writes are atomic
/// (write-then-rename). The key digests prompt, model_id, temperature,
/// max_tokens, and the sample seed when temperature > 0.
class CachingBackend : public Backend {
public:
    CachingBackend(std::shared_ptr<Backend> inner, std::filesystem::path cache_dir);

    CompletionResult complete(const CompletionRequest& request) override;

    static std::string request_digest(const CompletionRequest& request);

private:
    std::shared_ptr<Backend> inner_;
    std::filesystem::path dir_;
};

// ---------------------------------------------------------------------------
// Rate limiting

/// Shared token bucket; a burst larger than the bucket blocks callers until
/// tokens refill.
class RateLimitedBackend : public Backend {
public:
    RateLimitedBackend(std::shared_ptr<Backend> inner, double requests_per_second,
                       double burst = 1.0);

    CompletionResult complete(const CompletionRequest& request) override;

private:
    void acquire();

    std::shared_ptr<Backend> inner_;
    double rate_;
    double burst_;
    double tokens_;
    std::chrono::steady_clock::time_point last_refill_;
    std::mutex mutex_;
};

}  // namespace prp
