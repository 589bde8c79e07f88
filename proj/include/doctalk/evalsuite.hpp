#pragma once

#include "doctalk/llm_client.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace doctalk {

// ---------------------------------------------------------------------------
// Turn-level word overlap (CoQA style)
// ---------------------------------------------------------------------------

struct QATurnRecord {
    std::string dialogue_id;
    std::size_t turn_index = 1;
    std::string question;
    std::vector<std::string> reference_answers;
    std::string model_answer;
};

struct OverlapMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t answer_word_count = 0;
};

/// Lowercase, drop ASCII punctuation, drop the articles a/an/the, split on
/// whitespace.
std::vector<std::string> normalize_answer(std::string_view text);

/// Multiset token overlap against each reference; the reference with the best
/// F1 wins. Both sides empty scores (1, 1, 1); one side empty scores zeros.
OverlapMetrics token_overlap_prf(std::string_view pred, const std::vector<std::string>& refs);

struct TurnAggregate {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double answer_words = 0.0;
    std::size_t count = 0;
};

struct OverlapReport {
    std::map<std::size_t, TurnAggregate> per_turn;
    TurnAggregate overall;
};

/// Arithmetic means grouped by turn index, plus overall means over all records.
OverlapReport turn_level_aggregate(const std::vector<std::pair<QATurnRecord, OverlapMetrics>>& records);

nlohmann::ordered_json to_json(const OverlapReport& report);

std::vector<QATurnRecord> read_qa_records(const std::filesystem::path& path);

/// Flattens a CoQA-layout JSON file ({"data": [{"id", "questions", "answers",
/// "additional_answers"}]}) into records with empty model answers.
std::vector<QATurnRecord> convert_coqa(const nlohmann::json& coqa);

nlohmann::ordered_json to_json(const QATurnRecord& r);

// ---------------------------------------------------------------------------
// Intent coverage (LLM-as-judge)
// ---------------------------------------------------------------------------

struct ResponseSections {
    std::string intro;
    std::vector<std::string> bullets;
    std::vector<std::string> trailing;  // lines after the bullet block, in no section
};

/// Intro = lines before the first bullet; bullets = the following run of
/// lines marked "-", "*", "•" or "N."/"N)". Blank lines inside the run are
/// allowed.
ResponseSections split_response(std::string_view response);

using IntentSet = std::set<std::size_t>;

/// |addressed ∩ intents| / |intents|. Throws std::invalid_argument on empty intents.
double intent_coverage(const IntentSet& addressed, const IntentSet& intents);

struct IntentCoverageReport {
    double intro = 0.0;
    double bullet = 0.0;
    double loose = 0.0;
    double strict = 0.0;
    IntentSet addressed_intro;
    IntentSet addressed_bullet;
};

IntentCoverageReport judge_metrics(const IntentSet& intro, const IntentSet& bullet, const IntentSet& intents);

struct DialogueTurn {
    std::string role;
    std::string text;
};

struct JudgeSample {
    std::string sample_id;
    std::vector<DialogueTurn> conversation;
    std::string system_prompt;
    std::vector<std::string> intents;  // 1-3
    std::string response_intro;
    std::vector<std::string> response_bullets;
};

/// Accepts either pre-split sections or a raw "response" which is split here.
JudgeSample judge_sample_from_json(const nlohmann::json& j);
std::vector<JudgeSample> read_judge_samples(const std::filesystem::path& path);

struct JudgeVerdict {
    IntentSet intro;
    IntentSet bullet;
    std::size_t requests = 0;
    std::size_t unparseable = 0;  // replies defaulted to NO
};

/// "YES" / "NO" from the first word of a reply, or nullopt.
std::optional<bool> parse_yes_no(std::string_view reply);

/// Renders the per-(intent, section) judge question.
std::string build_judge_prompt(const JudgeSample& sample, std::size_t intent, bool bullet_section);

/// One strict YES/NO request per (intent, section). An unparseable reply is
/// retried once, then counted as NO. Empty sections are NO without a request.
JudgeVerdict judge_with_llm(LlmClient& llm, const JudgeSample& sample,
                            const GenerateParams& params = {8, 0.0});

struct JudgeReport {
    struct Row {
        std::string sample_id;
        IntentCoverageReport metrics;
        std::size_t unparseable = 0;
    };
    std::vector<Row> rows;
    double intro = 0.0;
    double bullet = 0.0;
    double loose = 0.0;
    double strict = 0.0;
};

JudgeReport summarize_judge(std::vector<JudgeReport::Row> rows);
nlohmann::ordered_json to_json(const JudgeReport& report);

}  // namespace doctalk
