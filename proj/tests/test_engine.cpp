#include <string>
#include <vector>

#include "doctest.h"
#include "prp/engine.hpp"
#include "stub_backend.hpp"

using namespace prp;
using prp_test::StubBackend;

namespace {
const std::string kQuestion = "There are 7 students in the class and 42 apples. How many each?";
}

TEST_CASE("always-confirming stub verifies at iteration 1") {
    StubBackend backend(kQuestion, /*confirm=*/true);
    SolveConfig config;
    config.max_iterations = 5;
    SolveTrace trace = solve_prp(kQuestion, "q/confirm", backend, config);
    CHECK(trace.termination == Termination::VerifiedAtIteration);
    CHECK(trace.verified_iteration == 1);
    REQUIRE(trace.iterations.size() == 1);
    CHECK(trace.iterations[0].outcome.status == VerificationStatus::Verified);
    CHECK_FALSE(trace.iterations[0].rectified_answer.has_value());
    // 2 init + 2 verification, no rectification.
    CHECK(trace.backend_calls == 4);
    CHECK(backend.calls() == 4);
    CHECK(trace.final_answer.value == trace.initial_answer.value);
}

TEST_CASE("always-refuting stub exhausts the budget") {
    for (int k = 1; k <= 6; ++k) {
        StubBackend backend(kQuestion, /*confirm=*/false);
        SolveConfig config;
        config.max_iterations = k;
        SolveTrace trace = solve_prp(kQuestion, "q/refute", backend, config);
        CHECK(trace.termination == Termination::BudgetExhausted);
        REQUIRE(static_cast<int>(trace.iterations.size()) == k);
        int rectifications = 0;
        for (const auto& it : trace.iterations) {
            CHECK(it.outcome.status == VerificationStatus::Refuted);
            if (it.rectified_answer) ++rectifications;
        }
        CHECK(rectifications == k);
        // Final answer is a_K, the last rectified answer.
        CHECK(trace.final_answer.value == trace.iterations.back().rectified_answer->value);
        CHECK(static_cast<int>(trace.iterations.back().incorrect_set_after.size()) <= k);
        CHECK(trace.backend_calls == 2 + 4 * k);  // 2 + 2v + 2r with v = r = k
    }
}

TEST_CASE("hint set grows in insertion order without duplicates") {
    StubBackend backend(kQuestion, /*confirm=*/false, 500);
    SolveConfig config;
    config.max_iterations = 3;
    SolveTrace trace = solve_prp(kQuestion, "q/hints", backend, config);
    const auto& c = trace.iterations.back().incorrect_set_after;
    REQUIRE(c.size() == 3);
    CHECK(c[0].value->to_string() == "500");
    CHECK(c[1].value->to_string() == "501");
    CHECK(c[2].value->to_string() == "502");
}

TEST_CASE("non-numeric initial answer skips verification but still rectifies") {
    // Generation replies carry no parsable number on the first call.
    class UnparseableFirst : public Backend {
    public:
        CompletionResult complete(const CompletionRequest& request) override {
            CompletionResult r;
            const std::string& p = request.prompt;
            if (prp_test::contains(p, "Therefore, the answer (expressed in Arabic numerals")) {
                r.text = p.substr(0, p.find(" Therefore, the answer (expressed"));
            } else if (prp_test::contains(p, "Suppose the answer is")) {
                r.text = "Unknown";
            } else {
                r.text = ++generations_ == 1 ? "I cannot say." : "The answer is 7.";
            }
            return r;
        }
        int generations_ = 0;
    };
    UnparseableFirst backend;
    SolveConfig config;
    config.max_iterations = 2;
    SolveTrace trace = solve_prp(kQuestion, "q/skip", backend, config);
    CHECK(trace.initial_answer.kind == AnswerKind::Unparseable);
    REQUIRE(!trace.iterations.empty());
    CHECK(trace.iterations[0].outcome.status == VerificationStatus::Skipped);
    // Skip costs no verification calls but still triggers rectification.
    CHECK(trace.iterations[0].rectified_answer.has_value());
    CHECK(trace.iterations[0].rectified_answer->is_number());
}

TEST_CASE("question without numerals skips verification") {
    class Plain : public Backend {
    public:
        CompletionResult complete(const CompletionRequest& request) override {
            CompletionResult r;
            if (prp_test::contains(request.prompt, "Therefore, the answer")) {
                r.text = request.prompt;
            } else {
                r.text = "The answer is 4.";
            }
            return r;
        }
    };
    Plain backend;
    SolveConfig config;
    config.max_iterations = 1;
    SolveTrace trace =
        solve_prp("What is two plus two?", "q/nonum", backend, config);
    CHECK(trace.iterations[0].outcome.status == VerificationStatus::Skipped);
    CHECK(trace.termination == Termination::BudgetExhausted);
}

TEST_CASE("mask selection is deterministic per (seed, question_id)") {
    SolveConfig config;
    config.rng_seed = 7;
    auto draw = [&](const std::string& id) {
        RngStream s = mask_stream(config, id);
        std::vector<std::size_t> out;
        for (int i = 0; i < 8; ++i) out.push_back(s.next_index(3));
        return out;
    };
    CHECK(draw("a") == draw("a"));
    CHECK(draw("a") != draw("b"));  // overwhelmingly likely, fixed seeds
}

TEST_CASE("answer_at_budget replays the trace") {
    StubBackend backend(kQuestion, /*confirm=*/false, 100);
    SolveConfig config;
    config.max_iterations = 4;
    SolveTrace trace = solve_prp(kQuestion, "q/budget", backend, config);
    CHECK(answer_at_budget(trace, 0).value == trace.initial_answer.value);
    CHECK(answer_at_budget(trace, 2).value == trace.iterations[1].rectified_answer->value);
    CHECK(answer_at_budget(trace, 4).value == trace.final_answer.value);
    CHECK(answer_at_budget(trace, 9).value == trace.final_answer.value);

    StubBackend confirm(kQuestion, /*confirm=*/true);
    SolveTrace verified = solve_prp(kQuestion, "q/budget2", confirm, config);
    // Verified at iteration 1: any budget >= 1 returns the verified answer.
    CHECK(answer_at_budget(verified, 1).value == verified.final_answer.value);
    CHECK(answer_at_budget(verified, 3).value == verified.final_answer.value);
}

TEST_CASE("trace JSON round-trip") {
    StubBackend backend(kQuestion, /*confirm=*/false);
    SolveConfig config;
    config.max_iterations = 2;
    SolveTrace trace = solve_prp(kQuestion, "q/json", backend, config);
    auto j = trace_to_json(trace);
    SolveTrace back = trace_from_json(j);
    CHECK(trace_to_json(back) == j);
    CHECK(back.question == trace.question);
    CHECK(back.backend_calls == trace.backend_calls);
    CHECK(back.final_answer.value == trace.final_answer.value);
    CHECK(back.iterations.size() == trace.iterations.size());
}

TEST_CASE("solve error carries the partial trace") {
    class FailsLater : public Backend {
    public:
        CompletionResult complete(const CompletionRequest& request) override {
            if (++calls_ > 2) throw BackendError(ErrorKind::Transport, "connection lost");
            CompletionResult r;
            if (prp_test::contains(request.prompt, "Therefore, the answer")) {
                r.text = request.prompt;
            } else {
                r.text = "The answer is 12.";
            }
            return r;
        }
        int calls_ = 0;
    };
    FailsLater backend;
    SolveConfig config;
    config.max_iterations = 3;
    try {
        solve_prp(kQuestion, "q/fail", backend, config);
        FAIL("expected SolveError");
    } catch (const SolveError& e) {
        CHECK(e.partial_trace.initial_answer.is_number());
        CHECK(e.partial_trace.backend_calls == 2);
    }
}
