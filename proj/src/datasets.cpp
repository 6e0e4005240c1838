#include "prp/datasets.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "prp/numerics.hpp"

namespace prp {
namespace {

using nlohmann::json;

Decimal parse_gold_or_throw(const std::string& text, const std::string& record_id) {
    // Gold fields are numbers or numeric strings, sometimes with "$" or
    // separators; reuse the answer parser and insist on a number.
    ParsedAnswer parsed = parse_answer_text(text);
    if (!parsed.is_number())
        throw std::runtime_error("unparseable gold answer for record " + record_id + ": " + text);
    return *parsed.value;
}

std::string json_number_as_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();  // numbers keep their literal form
}

DatasetRecord adapt_canonical(const json& line, const std::string& dataset_name, int index) {
    DatasetRecord record;
    record.id = line.value("id", dataset_name + "/" + std::to_string(index));
    record.question = line.at("question").get<std::string>();
    record.gold_answer = parse_gold_or_throw(json_number_as_string(line.at("answer")), record.id);
    if (line.contains("n_steps")) record.n_steps = line["n_steps"].get<int>();
    return record;
}

DatasetRecord adapt_gsm8k(const json& line, const std::string& dataset_name, int index) {
    DatasetRecord record;
    record.id = dataset_name + "/" + std::to_string(index);
    record.question = line.at("question").get<std::string>();
    std::string answer = line.at("answer").get<std::string>();
    auto gold = parse_gsm8k_answer(answer);
    if (!gold)
        throw std::runtime_error("missing #### marker in gold answer for record " + record.id);
    record.gold_answer = *gold;
    auto marker = answer.find("####");
    record.n_steps = count_sentences(answer.substr(0, marker));
    return record;
}

DatasetRecord adapt_svamp(const json& line, const std::string& dataset_name, int index) {
    DatasetRecord record;
    record.id = line.contains("ID") ? dataset_name + "/" + json_number_as_string(line["ID"])
                                    : dataset_name + "/" + std::to_string(index);
    std::string body = line.value("Body", "");
    std::string question = line.at("Question").get<std::string>();
    record.question = body.empty() ? question : body + " " + question;
    record.gold_answer = parse_gold_or_throw(json_number_as_string(line.at("Answer")), record.id);
    return record;
}

DatasetRecord adapt_mawps(const json& line, const std::string& dataset_name, int index) {
    DatasetRecord record;
    record.id = line.contains("iIndex")
                    ? dataset_name + "/" + json_number_as_string(line["iIndex"])
                    : dataset_name + "/" + std::to_string(index);
    record.question = line.at("sQuestion").get<std::string>();
    const json& solutions = line.at("lSolutions");
    if (!solutions.is_array() || solutions.empty())
        throw std::runtime_error("empty lSolutions for record " + record.id);
    record.gold_answer = parse_gold_or_throw(json_number_as_string(solutions[0]), record.id);
    return record;
}

DatasetRecord adapt_gsm_ic(const json& line, const std::string& dataset_name, int index) {
    DatasetRecord record;
    record.id = dataset_name + "/" + std::to_string(index);
    record.question = line.contains("new_question") ? line["new_question"].get<std::string>()
                                                    : line.at("question").get<std::string>();
    record.gold_answer = parse_gold_or_throw(json_number_as_string(line.at("answer")), record.id);
    if (line.contains("n_steps")) record.n_steps = line["n_steps"].get<int>();
    return record;
}

}  // namespace

const std::vector<DatasetMeta>& known_datasets() {
    static const std::vector<DatasetMeta> metas = {
        {"SingleEq", 508, 27.4, 0.0},   {"MultiArith", 600, 31.8, 0.0},
        {"SingleOp", 562, 20.9, 0.0},   {"AddSub", 395, 31.5, 0.309},
        {"SVAMP", 1000, 31.8, 0.367},   {"GSM8K", 1319, 46.9, 0.062},
        {"GSM-IC2-1K", 1000, 41.8, 1.0}, {"GSM-ICM-1K", 1000, 61.4, 1.0},
    };
    return metas;
}

std::optional<DatasetMeta> dataset_meta(const std::string& name) {
    for (const auto& meta : known_datasets())
        if (meta.name == name) return meta;
    return std::nullopt;
}

const std::vector<std::string>& known_adapters() {
    static const std::vector<std::string> adapters = {"canonical", "gsm8k", "svamp", "mawps",
                                                      "gsm-ic"};
    return adapters;
}

std::vector<DatasetRecord> load_jsonl(const std::filesystem::path& path,
                                      const std::string& dataset_name,
                                      const std::string& adapter) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());

    std::vector<DatasetRecord> records;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json parsed = json::parse(line, nullptr, false);
        if (parsed.is_discarded())
            throw std::runtime_error(path.string() + ":" + std::to_string(line_number) +
                                     ": malformed JSON line");
        try {
            int index = static_cast<int>(records.size());
            if (adapter == "canonical")
                records.push_back(adapt_canonical(parsed, dataset_name, index));
            else if (adapter == "gsm8k")
                records.push_back(adapt_gsm8k(parsed, dataset_name, index));
            else if (adapter == "svamp")
                records.push_back(adapt_svamp(parsed, dataset_name, index));
            else if (adapter == "mawps")
                records.push_back(adapt_mawps(parsed, dataset_name, index));
            else if (adapter == "gsm-ic")
                records.push_back(adapt_gsm_ic(parsed, dataset_name, index));
            else
                throw std::runtime_error("unknown adapter: " + adapter);
        } catch (const json::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_number) + ": " +
                                     e.what());
        }
        if (records.back().question.empty())
            throw std::runtime_error(path.string() + ":" + std::to_string(line_number) +
                                     ": empty question");
    }
    return records;
}

ValidationResult validate_counts(const std::vector<DatasetRecord>& records,
                                 const DatasetMeta& meta) {
    ValidationResult result;
    result.actual = static_cast<int>(records.size());
    result.expected = meta.expected_count;
    result.matches = result.actual == result.expected;
    std::ostringstream msg;
    if (result.matches) {
        msg << meta.name << ": " << result.actual << " records (expected " << result.expected
            << ": OK)";
    } else {
        msg << "warning: " << meta.name << ": " << result.actual << " records, expected "
            << result.expected;
    }
    result.message = msg.str();
    return result;
}

std::vector<DatasetRecord> merge_ic(const std::vector<DatasetRecord>& ic2_records,
                                    const std::vector<DatasetRecord>& icm_records) {
    std::vector<DatasetRecord> merged;
    merged.reserve(ic2_records.size() + icm_records.size());
    std::set<std::string> seen;
    auto append = [&](const DatasetRecord& record) {
        DatasetRecord copy = record;
        copy.id = "GSM-IC-2K/" + record.id;
        if (!seen.insert(copy.id).second)
            throw std::runtime_error("merge_ic: duplicate id after prefixing: " + copy.id);
        merged.push_back(std::move(copy));
    };
    for (const auto& r : ic2_records) append(r);
    for (const auto& r : icm_records) append(r);
    return merged;
}

std::string bucket_for_steps(int n_steps) {
    if (n_steps <= 2) return "2";
    if (n_steps == 3) return "3";
    if (n_steps == 4) return "4";
    return ">=5";
}

std::map<std::string, std::vector<DatasetRecord>> bucket_by_steps(
    const std::vector<DatasetRecord>& records) {
    std::map<std::string, std::vector<DatasetRecord>> buckets;
    for (const auto& record : records) {
        std::string key = record.n_steps ? bucket_for_steps(*record.n_steps) : "unbucketed";
        buckets[key].push_back(record);
    }
    return buckets;
}

int count_sentences(const std::string& text) {
    int count = 0;
    bool in_sentence = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.' || c == '!' || c == '?' || c == '\n') {
            // '.' inside a number does not end a sentence
            if (c == '.' && i + 1 < text.size() && text[i + 1] >= '0' && text[i + 1] <= '9')
                continue;
            if (in_sentence) ++count;
            in_sentence = false;
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            in_sentence = true;
        }
    }
    if (in_sentence) ++count;
    return count;
}

std::optional<Decimal> parse_gsm8k_answer(const std::string& answer_text) {
    auto marker = answer_text.rfind("####");
    if (marker == std::string::npos) return std::nullopt;
    std::string tail = answer_text.substr(marker + 4);
    ParsedAnswer parsed = parse_answer_text(tail);
    if (!parsed.is_number()) return std::nullopt;
    return parsed.value;
}

void write_canonical_jsonl(const std::vector<DatasetRecord>& records,
                           const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path.string());
    for (const auto& record : records) {
        json line = {{"id", record.id},
                     {"question", record.question},
                     {"answer", record.gold_answer.to_string()}};
        if (record.n_steps) line["n_steps"] = *record.n_steps;
        out << line.dump() << '\n';
    }
}

}  // namespace prp
