#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "prp/datasets.hpp"

using namespace prp;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() /
                (name + "_" +
                 std::to_string(
                     std::chrono::steady_clock::now().time_since_epoch().count()) +
                 ".jsonl");
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("known datasets carry published sizes") {
    CHECK(known_datasets().size() == 8);
    CHECK(dataset_meta("AddSub")->expected_count == 395);
    CHECK(dataset_meta("GSM8K")->expected_count == 1319);
    CHECK(dataset_meta("SVAMP")->expected_count == 1000);
    CHECK_FALSE(dataset_meta("NoSuch").has_value());
}

TEST_CASE("canonical adapter") {
    auto path = write_temp("canonical",
                           R"({"id": "AddSub/1", "question": "How many?", "answer": "58"})"
                           "\n"
                           R"({"question": "Second?", "answer": 0.1, "n_steps": 3})"
                           "\n");
    auto records = load_jsonl(path, "AddSub");
    std::filesystem::remove(path);
    REQUIRE(records.size() == 2);
    CHECK(records[0].id == "AddSub/1");
    CHECK(records[0].gold_answer.to_string() == "58");
    CHECK_FALSE(records[0].n_steps.has_value());
    CHECK(records[1].id == "AddSub/1");  // auto id from index
    CHECK(records[1].gold_answer.to_string() == "0.1");
    CHECK(records[1].n_steps == 3);
}

TEST_CASE("gsm8k adapter derives gold and step count") {
    auto path = write_temp(
        "gsm8k",
        R"({"question": "Chickens?", "answer": "First step here. Second step. Third one.\n#### 20"})"
        "\n");
    auto records = load_jsonl(path, "GSM8K", "gsm8k");
    std::filesystem::remove(path);
    REQUIRE(records.size() == 1);
    CHECK(records[0].gold_answer.to_string() == "20");
    CHECK(records[0].n_steps == 3);
}

TEST_CASE("svamp adapter joins body and question") {
    auto path = write_temp(
        "svamp",
        R"({"Body": "There are 10 books.", "Question": "How many more?", "Answer": 1, "ID": "chal-1"})"
        "\n");
    auto records = load_jsonl(path, "SVAMP", "svamp");
    std::filesystem::remove(path);
    REQUIRE(records.size() == 1);
    CHECK(records[0].id == "SVAMP/chal-1");
    CHECK(records[0].question == "There are 10 books. How many more?");
    CHECK(records[0].gold_answer.to_string() == "1");
}

TEST_CASE("mawps adapter reads solutions list") {
    auto path = write_temp(
        "mawps", R"({"sQuestion": "After paying 6 dollars...", "lSolutions": [58.0], "iIndex": 17})"
                 "\n");
    auto records = load_jsonl(path, "AddSub", "mawps");
    std::filesystem::remove(path);
    REQUIRE(records.size() == 1);
    CHECK(records[0].id == "AddSub/17");
    CHECK(records[0].gold_answer.to_string() == "58");
}

TEST_CASE("gsm-ic adapter prefers the distractor question") {
    auto path = write_temp(
        "gsmic",
        R"({"new_question": "With distractor?", "question": "Plain?", "answer": "25", "n_steps": 2})"
        "\n");
    auto records = load_jsonl(path, "GSM-IC2-1K", "gsm-ic");
    std::filesystem::remove(path);
    REQUIRE(records.size() == 1);
    CHECK(records[0].question == "With distractor?");
    CHECK(records[0].n_steps == 2);
}

TEST_CASE("malformed lines report the line number") {
    auto path = write_temp("bad", "{\"question\": \"ok\", \"answer\": \"1\"}\nnot json\n");
    try {
        load_jsonl(path, "X");
        FAIL("expected parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("validate_counts is advisory") {
    std::vector<DatasetRecord> records(395);
    auto meta = *dataset_meta("AddSub");
    auto ok = validate_counts(records, meta);
    CHECK(ok.matches);
    CHECK(ok.message == "AddSub: 395 records (expected 395: OK)");
    records.pop_back();
    auto warn = validate_counts(records, meta);
    CHECK_FALSE(warn.matches);
    CHECK(warn.message.find("warning") != std::string::npos);
    CHECK(warn.actual == 394);
}

TEST_CASE("merge_ic prefixes and rejects collisions") {
    std::vector<DatasetRecord> ic2 = {{"GSM-IC2-1K/0", "q1", Decimal::from_int(1), {}}};
    std::vector<DatasetRecord> icm = {{"GSM-ICM-1K/0", "q2", Decimal::from_int(2), {}}};
    auto merged = merge_ic(ic2, icm);
    REQUIRE(merged.size() == 2);
    CHECK(merged[0].id == "GSM-IC-2K/GSM-IC2-1K/0");
    CHECK(merged[1].id == "GSM-IC-2K/GSM-ICM-1K/0");
    CHECK_THROWS(merge_ic(ic2, ic2));
}

TEST_CASE("difficulty buckets") {
    CHECK(bucket_for_steps(1) == "2");
    CHECK(bucket_for_steps(2) == "2");
    CHECK(bucket_for_steps(3) == "3");
    CHECK(bucket_for_steps(4) == "4");
    CHECK(bucket_for_steps(5) == ">=5");
    CHECK(bucket_for_steps(9) == ">=5");

    std::vector<DatasetRecord> records = {{"a", "q", Decimal::from_int(1), 2},
                                          {"b", "q", Decimal::from_int(1), 5},
                                          {"c", "q", Decimal::from_int(1), std::nullopt}};
    auto buckets = bucket_by_steps(records);
    CHECK(buckets["2"].size() == 1);
    CHECK(buckets[">=5"].size() == 1);
    CHECK(buckets["unbucketed"].size() == 1);
}

TEST_CASE("sentence counting") {
    CHECK(count_sentences("One. Two! Three?") == 3);
    CHECK(count_sentences("Line one\nline two") == 2);
    CHECK(count_sentences("Costs 3.50 dollars. Done.") == 2);  // decimal point kept
    CHECK(count_sentences("") == 0);
    CHECK(count_sentences("no terminator") == 1);
}

TEST_CASE("gsm8k answer marker") {
    CHECK(parse_gsm8k_answer("steps...\n#### 1,234")->to_string() == "1234");
    CHECK(parse_gsm8k_answer("#### -5")->to_string() == "-5");
    CHECK_FALSE(parse_gsm8k_answer("no marker").has_value());
}

TEST_CASE("canonical writer round-trips") {
    std::vector<DatasetRecord> records = {{"D/0", "How many?", *Decimal::parse("0.1"), 3},
                                          {"D/1", "And now?", Decimal::from_int(58), std::nullopt}};
    auto path = write_temp("roundtrip", "");
    write_canonical_jsonl(records, path);
    auto back = load_jsonl(path, "D");
    std::filesystem::remove(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].id == "D/0");
    CHECK(back[0].question == "How many?");
    CHECK(back[0].gold_answer == records[0].gold_answer);
    CHECK(back[0].n_steps == 3);
    CHECK_FALSE(back[1].n_steps.has_value());
}
