#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prp/decimal.hpp"

namespace prp {

struct DatasetRecord {
    std::string id;  // dataset-name + index, e.g. "AddSub/17"
    std::string question;
    Decimal gold_answer;
    std::optional<int> n_steps;  // reasoning-step count, when derivable
};

/// Expected sizes and statistics (Table 3).
struct DatasetMeta {
    std::string name;
    int expected_count = 0;
    double avg_words = 0.0;
    double ic_fraction = 0.0;
};

/// The eight benchmark datasets with their published sizes.
const std::vector<DatasetMeta>& known_datasets();
std::optional<DatasetMeta> dataset_meta(const std::string& name);

/// Canonical interchange format: JSONL with {id, question, answer, n_steps?}.
/// Adapters normalize upstream schemas into it:
///   canonical  {id?, question, answer, n_steps?}
///   gsm8k      {question, answer: "...#### N"}  (n_steps = solution sentences)
///   svamp      {Body, Question, Answer, ID?}
///   mawps      {sQuestion, lSolutions, iIndex}  (AddSub/SingleOp/MultiArith/SingleEq)
///   gsm-ic     {new_question|question, answer, n_steps?}
std::vector<DatasetRecord> load_jsonl(const std::filesystem::path& path,
                                      const std::string& dataset_name,
                                      const std::string& adapter = "canonical");

const std::vector<std::string>& known_adapters();

struct ValidationResult {
    bool matches = false;
    int actual = 0;
    int expected = 0;
    std::string message;  // advisory; never a failure
};

/// Warns (never fails) when the record count differs from Table 3.
ValidationResult validate_counts(const std::vector<DatasetRecord>& records,
                                 const DatasetMeta& meta);

/// GSM-IC-2K: ic2 then icm, ids re-prefixed "GSM-IC-2K/". Throws on id
/// collision after prefixing.
std::vector<DatasetRecord> merge_ic(const std::vector<DatasetRecord>& ic2_records,
                                    const std::vector<DatasetRecord>& icm_records);

/// Difficulty buckets by reasoning steps: "2", "3", "4", ">=5", plus
/// "unbucketed" for records without n_steps.
std::map<std::string, std::vector<DatasetRecord>> bucket_by_steps(
    const std::vector<DatasetRecord>& records);

std::string bucket_for_steps(int n_steps);

/// Sentence-count heuristic behind n_steps: splits on newlines and
/// terminal punctuation.
int count_sentences(const std::string& text);

/// Extracts the gold answer from a GSM8K-style solution ("... #### 58").
std::optional<Decimal> parse_gsm8k_answer(const std::string& answer_text);

/// Writes records in the canonical JSONL interchange format.
void write_canonical_jsonl(const std::vector<DatasetRecord>& records,
                           const std::filesystem::path& path);

}  // namespace prp
