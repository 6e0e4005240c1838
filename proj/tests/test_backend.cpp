#include <chrono>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <thread>

#include "doctest.h"
#include "prp/backend.hpp"

using namespace prp;

namespace {

CompletionRequest req(std::string prompt) {
    CompletionRequest r;
    r.prompt = std::move(prompt);
    return r;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("prp_test_" + std::to_string(std::chrono::steady_clock::now()
                                                 .time_since_epoch()
                                                 .count()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("normalize_prompt lowercases and collapses whitespace") {
    CHECK(normalize_prompt("  Q:  What\n\tIS  it? ") == "q: what is it?");
    CHECK(normalize_prompt("abc") == "abc");
    CHECK(normalize_prompt("") == "");
}

TEST_CASE("scripted backend matches content in script order") {
    ScriptedFixture fixture;
    fixture.entries = {{MatchType::Equals, "q: one. a: let's think step by step", "first"},
                       {MatchType::Prefix, "q: one", "second"},
                       {MatchType::Contains, "one", "third"}};
    ScriptedBackend backend(fixture);
    // Identical prompt three times: entries consumed first-match in order.
    CHECK(backend.complete(req("Q: one. A: Let's think step by step")).text == "first");
    CHECK(backend.complete(req("Q: one. A: Let's think step by step")).text == "second");
    CHECK(backend.complete(req("Q: one. A: Let's think step by step")).text == "third");
    CHECK(backend.consumed_count() == 3);
    CHECK_NOTHROW(backend.check_all_consumed());
}

TEST_CASE("scripted backend strict mode flags misses and leftovers") {
    ScriptedFixture fixture;
    fixture.entries = {{MatchType::Equals, "expected prompt", "reply"}};
    ScriptedBackend backend(fixture);
    try {
        backend.complete(req("something else"));
        FAIL("expected FixtureMiss");
    } catch (const BackendError& e) {
        CHECK(e.kind() == ErrorKind::FixtureMiss);
    }
    CHECK_THROWS(backend.check_all_consumed());
}

TEST_CASE("retry recovers from transient failures") {
    class Flaky : public Backend {
    public:
        explicit Flaky(int failures) : failures_(failures) {}
        CompletionResult complete(const CompletionRequest&) override {
            if (attempts_++ < failures_) throw BackendError(ErrorKind::Transport, "boom");
            CompletionResult r;
            r.text = "ok";
            return r;
        }
        int attempts_ = 0;

    private:
        int failures_;
    };

    Flaky flaky(2);
    RetryPolicy policy;
    policy.max_attempts = 3;
    policy.base_delay = std::chrono::milliseconds(1);
    RngStream jitter(1);
    int attempts = 0;
    auto result = with_retry(flaky, req("p"), policy, jitter, &attempts);
    CHECK(result.text == "ok");
    CHECK(attempts == 3);

    Flaky hopeless(10);
    try {
        with_retry(hopeless, req("p"), policy, jitter);
        FAIL("expected RetriesExhausted");
    } catch (const BackendError& e) {
        CHECK(e.kind() == ErrorKind::RetriesExhausted);
    }
    CHECK(hopeless.attempts_ == 3);
}

TEST_CASE("retry does not retry fatal errors") {
    class AuthFail : public Backend {
    public:
        CompletionResult complete(const CompletionRequest&) override {
            ++attempts_;
            throw BackendError(ErrorKind::Auth, "bad key");
        }
        int attempts_ = 0;
    };
    AuthFail backend;
    RetryPolicy policy;
    policy.base_delay = std::chrono::milliseconds(1);
    RngStream jitter(1);
    CHECK_THROWS_AS(with_retry(backend, req("p"), policy, jitter), BackendError);
    CHECK(backend.attempts_ == 1);
}

TEST_CASE("caching backend returns identical completions without re-calling") {
    class Counting : public Backend {
    public:
        CompletionResult complete(const CompletionRequest& r) override {
            ++calls_;
            CompletionResult out;
            out.text = "reply to " + r.prompt;
            return out;
        }
        int calls_ = 0;
    };

    TempDir dir;
    auto inner = std::make_shared<Counting>();
    CachingBackend cache(inner, dir.path);

    auto first = cache.complete(req("hello"));
    CHECK(first.text == "reply to hello");
    CHECK_FALSE(first.cached);
    auto second = cache.complete(req("hello"));
    CHECK(second.text == "reply to hello");
    CHECK(second.cached);
    CHECK(inner->calls_ == 1);

    auto other = cache.complete(req("different"));
    CHECK(other.text == "reply to different");
    CHECK(inner->calls_ == 2);
}

TEST_CASE("cache key covers sampling parameters") {
    CompletionRequest a = req("same prompt");
    CompletionRequest b = req("same prompt");
    CHECK(CachingBackend::request_digest(a) == CachingBackend::request_digest(b));
    b.params.max_tokens = 256;
    CHECK(CachingBackend::request_digest(a) != CachingBackend::request_digest(b));
    b = req("same prompt");
    b.params.model_id = "other";
    CHECK(CachingBackend::request_digest(a) != CachingBackend::request_digest(b));
    // Seed participates only when sampling is stochastic.
    CompletionRequest c = req("same prompt");
    c.sample_seed = 42;
    CHECK(CachingBackend::request_digest(a) == CachingBackend::request_digest(c));
    c.params.temperature = 0.7;
    CompletionRequest d = c;
    d.sample_seed = 43;
    CHECK(CachingBackend::request_digest(c) != CachingBackend::request_digest(d));
}

TEST_CASE("rate limiter delays a burst") {
    class Instant : public Backend {
    public:
        CompletionResult complete(const CompletionRequest&) override { return {}; }
    };
    // 50 rps, burst 1: the third call cannot complete before ~40 ms.
    RateLimitedBackend limited(std::make_shared<Instant>(), 50.0, 1.0);
    auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < 3; ++i) limited.complete(req("p"));
    auto elapsed = std::chrono::steady_clock::now() - start;
    CHECK(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() >= 30);
}
