#include "prp/backend.hpp"

#include <array>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"

namespace prp {
namespace {

// Minimal SHA-256, enough for content-addressed cache keys.
class Sha256 {
public:
    Sha256() { state_ = {0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                         0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u}; }

    void update(std::string_view data) {
        for (unsigned char c : data) {
            buffer_[buffer_len_++] = c;
            ++total_len_;
            if (buffer_len_ == 64) {
                process_block();
                buffer_len_ = 0;
            }
        }
    }

    std::string hex_digest() {
        std::uint64_t bit_len = total_len_ * 8;
        update("\x80");
        while (buffer_len_ != 56) update(std::string_view("\0", 1));
        for (int i = 7; i >= 0; --i) {
            char b = static_cast<char>((bit_len >> (i * 8)) & 0xff);
            update(std::string_view(&b, 1));
        }
        static const char* hex = "0123456789abcdef";
        std::string out;
        for (std::uint32_t w : state_) {
            for (int i = 28; i >= 0; i -= 4) out += hex[(w >> i) & 0xf];
        }
        return out;
    }

private:
    static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void process_block() {
        static constexpr std::array<std::uint32_t, 64> k = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
            0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
            0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
            0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
            0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
            0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
            0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
            0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
            0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
            0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
        std::array<std::uint32_t, 64> w{};
        for (int i = 0; i < 16; ++i) {
            w[i] = (std::uint32_t(buffer_[i * 4]) << 24) | (std::uint32_t(buffer_[i * 4 + 1]) << 16) |
                   (std::uint32_t(buffer_[i * 4 + 2]) << 8) | std::uint32_t(buffer_[i * 4 + 3]);
        }
        for (int i = 16; i < 64; ++i) {
            std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        auto [a, b, c, d, e, f, g, h] = std::tuple{state_[0], state_[1], state_[2], state_[3],
                                                   state_[4], state_[5], state_[6], state_[7]};
        for (int i = 0; i < 64; ++i) {
            std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            std::uint32_t ch = (e & f) ^ (~e & g);
            std::uint32_t t1 = h + s1 + ch + k[i] + w[i];
            std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            std::uint32_t t2 = s0 + maj;
            h = g; g = f; f = e; e = d + t1;
            d = c; c = b; b = a; a = t1 + t2;
        }
        state_[0] += a; state_[1] += b; state_[2] += c; state_[3] += d;
        state_[4] += e; state_[5] += f; state_[6] += g; state_[7] += h;
    }

    std::array<std::uint32_t, 8> state_;
    std::array<unsigned char, 64> buffer_{};
    std::size_t buffer_len_ = 0;
    std::uint64_t total_len_ = 0;
};

bool matches(const FixtureEntry& entry, const std::string& normalized_prompt) {
    switch (entry.match) {
        case MatchType::Equals:
            return normalized_prompt == entry.text;
        case MatchType::Prefix:
            return normalized_prompt.rfind(entry.text, 0) == 0;
        case MatchType::Contains:
            return normalized_prompt.find(entry.text) != std::string::npos;
    }
    return false;
}

}  // namespace

std::string normalize_prompt(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char raw : text) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += static_cast<char>(std::tolower(c));
    }
    return out;
}

ScriptedBackend::ScriptedBackend(ScriptedFixture fixture) : fixture_(std::move(fixture)) {
    for (auto& e : fixture_.entries) e.text = normalize_prompt(e.text);
    consumed_.assign(fixture_.entries.size(), false);
}

CompletionResult ScriptedBackend::complete(const CompletionRequest& request) {
    std::string normalized = normalize_prompt(request.prompt);
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < fixture_.entries.size(); ++i) {
        if (consumed_[i]) continue;
        if (matches(fixture_.entries[i], normalized)) {
            consumed_[i] = true;
            CompletionResult result;
            result.text = fixture_.entries[i].reply;
            result.provider_meta["fixture_entry"] = std::to_string(i);
            return result;
        }
    }
    throw BackendError(ErrorKind::FixtureMiss,
                       "scripted backend: no fixture entry matched prompt: " + request.prompt);
}

std::size_t ScriptedBackend::consumed_count() const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (bool c : consumed_)
        if (c) ++n;
    return n;
}

void ScriptedBackend::check_all_consumed() const {
    std::lock_guard lock(mutex_);
    if (!fixture_.strict) return;
    for (std::size_t i = 0; i < consumed_.size(); ++i) {
        if (!consumed_[i]) {
            throw BackendError(ErrorKind::FixtureMiss,
                               "scripted backend: unconsumed fixture entry " + std::to_string(i) +
                                   " (pattern: " + fixture_.entries[i].text + ")");
        }
    }
}

CompletionResult with_retry(Backend& backend, const CompletionRequest& request,
                            const RetryPolicy& policy, RngStream& jitter_rng, int* attempts_out) {
    std::string last_error;
    for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
        if (attempts_out) *attempts_out = attempt;
        try {
            return backend.complete(request);
        } catch (const BackendError& e) {
            if (!e.retryable()) throw;
            last_error = e.what();
            if (attempt == policy.max_attempts) break;
            double backoff = static_cast<double>(policy.base_delay.count());
            for (int i = 1; i < attempt; ++i) backoff *= policy.multiplier;
            auto delay = std::chrono::milliseconds(
                static_cast<std::int64_t>(backoff * jitter_rng.next_unit()));
            std::this_thread::sleep_for(delay);
        }
    }
    throw BackendError(ErrorKind::RetriesExhausted,
                       "retries exhausted after " + std::to_string(policy.max_attempts) +
                           " attempts; last error: " + last_error);
}

CompletionResult RetryBackend::complete(const CompletionRequest& request) {
    RngStream rng(0);
    {
        std::lock_guard lock(mutex_);
        rng = RngStream(rng_.next());
    }
    return with_retry(*inner_, request, policy_, rng);
}

CachingBackend::CachingBackend(std::shared_ptr<Backend> inner, std::filesystem::path cache_dir)
    : inner_(std::move(inner)), dir_(std::move(cache_dir)) {
    std::filesystem::create_directories(dir_);
}

std::string CachingBackend::request_digest(const CompletionRequest& request) {
    Sha256 sha;
    sha.update(request.prompt);
    sha.update("\x1f");
    sha.update(request.params.model_id);
    sha.update("\x1f");
    std::ostringstream params;
    params << request.params.temperature << '\x1f' << request.params.max_tokens;
    if (request.params.temperature > 0) params << '\x1f' << request.sample_seed;
    sha.update(params.str());
    return sha.hex_digest();
}

CompletionResult CachingBackend::complete(const CompletionRequest& request) {
    std::string digest = request_digest(request);
    auto path = dir_ / (digest + ".json");

    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        nlohmann::json entry = nlohmann::json::parse(in, nullptr, false);
        if (!entry.is_discarded() && entry.contains("text")) {
            CompletionResult result;
            result.text = entry["text"].get<std::string>();
            result.cached = true;
            return result;
        }
    }

    auto start = std::chrono::steady_clock::now();
    CompletionResult result = inner_->complete(request);
    result.latency = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - start);

    nlohmann::json entry = {
        {"request_digest", digest},
        {"prompt", request.prompt},
        {"text", result.text},
        {"created_at",
         std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch()).count()},
    };
    auto tmp = dir_ / (digest + ".tmp." + std::to_string(
        std::hash<std::thread::id>{}(std::this_thread::get_id())));
    {
        std::ofstream out(tmp);
        out << entry.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
    return result;
}

RateLimitedBackend::RateLimitedBackend(std::shared_ptr<Backend> inner, double requests_per_second,
                                       double burst)
    : inner_(std::move(inner)),
      rate_(requests_per_second),
      burst_(burst < 1.0 ? 1.0 : burst),
      tokens_(burst_),
      last_refill_(std::chrono::steady_clock::now()) {}

void RateLimitedBackend::acquire() {
    while (true) {
        std::chrono::duration<double> wait{0};
        {
            std::lock_guard lock(mutex_);
            auto now = std::chrono::steady_clock::now();
            tokens_ += std::chrono::duration<double>(now - last_refill_).count() * rate_;
            if (tokens_ > burst_) tokens_ = burst_;
            last_refill_ = now;
            if (tokens_ >= 1.0) {
                tokens_ -= 1.0;
                return;
            }
            wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
        }
        std::this_thread::sleep_for(wait);
    }
}

CompletionResult RateLimitedBackend::complete(const CompletionRequest& request) {
    acquire();
    return inner_->complete(request);
}

}  // namespace prp
