#pragma once

#include "doctalk/assembly.hpp"
#include "doctalk/corpus.hpp"
#include "doctalk/docgraph.hpp"
#include "doctalk/llm_client.hpp"
#include "doctalk/scorer.hpp"
#include "doctalk/usergen.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace doctalk {

struct ScorerConfig {
    std::string kind = "lexical";  // lexical | remote
    std::string endpoint;
    std::size_t batch_size = 100;
    std::size_t timeout_ms = 30000;
    std::size_t retries = 3;
    std::size_t max_in_flight = 8;
};

struct LlmConfig {
    std::string kind = "http";  // http | offline
    std::string endpoint;
    int max_tokens = 128;
    double temperature = 0.0;
    std::size_t timeout_ms = 60000;
    std::size_t retries = 3;
    std::size_t max_in_flight = 8;
    std::string model_id = "http";
    /// Environment variable holding a bearer token, if any.
    std::string api_key_env = "DOCTALK_LLM_API_KEY";
};

/// Every knob of a synthesis run. Defaults follow the published corpus setup.
struct PipelineConfig {
    std::string corpus_path;
    std::string qrels_path;
    std::size_t min_qrels = 10;
    std::size_t max_depth = kDefaultMaxDepth;
    std::size_t max_edges_per_doc = kDefaultMaxEdgesPerDoc;
    std::size_t n_docs = kDefaultDocsPerConversation;
    std::size_t min_words = kDefaultMinWords;
    ScorerConfig scorer;
    LlmConfig llm;
    std::string template_path;
    std::size_t history_window = kDefaultHistoryWindow;
    std::size_t max_attempts = kDefaultMaxAttempts;
    std::size_t workers = 1;
    std::uint64_t global_seed = 0;
    std::size_t anchors = 0;  // 0 = all
    std::string output_path = "doctalk.jsonl";
    std::string report_path;  // empty = <output>.report.json
    bool resume = false;
    std::string created_at;
    std::size_t variant_max_turns = kVariantMaxTurns;
    std::size_t variant_replicas = kVariantReplicas;

    /// Throws std::invalid_argument naming the first bad field.
    void validate() const;
    // Checks everything except how the scorer and LLM clients are built.
    void validate_run() const;
};

nlohmann::ordered_json to_json(const PipelineConfig& c);
/// Fields absent from `j` keep their current values in `base`.
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path);

struct AnchorFailure {
    std::string anchor_id;
    std::string failure_class;
    std::string message;
};

struct RunReport {
    std::size_t anchors_attempted = 0;
    std::size_t conversations_emitted = 0;
    std::map<std::string, std::size_t> conversations_failed;  // by failure class
    std::size_t skipped_existing = 0;
    std::size_t scorer_calls = 0;
    std::size_t scorer_pairs = 0;
    std::size_t llm_calls = 0;
    double wall_time_s = 0.0;
    std::vector<AnchorFailure> failures;

    std::size_t failed_total() const;
};

nlohmann::ordered_json to_json(const RunReport& r);

/// Outcome of one anchor: a conversation or a classified failure.
struct AnchorResult {
    std::optional<Conversation> conversation;
    std::optional<AnchorFailure> failure;
};

/// Runs the three stages for a single anchor with its own RNG stream.
AnchorResult synthesize_anchor(const CorpusHandle& corpus, const std::string& anchor,
                               const PipelineConfig& config, Scorer& scorer, LlmClient& llm,
                               const PromptTemplate& tmpl);

/// Anchors a run will process, in corpus order: all of them, or a seeded
/// sample of `config.anchors`.
std::vector<std::string> select_anchors(const CorpusHandle& corpus, const PipelineConfig& config);

/// Synthesizes every selected anchor whose conv_id is not in `existing` and
/// writes one JSONL line per conversation in anchor order, independent of the
/// worker count.
RunReport run_synthesis(const CorpusHandle& corpus, const PipelineConfig& config, Scorer& scorer,
                        LlmClient& llm, const PromptTemplate& tmpl, std::ostream& out,
                        const std::set<std::string>& existing = {});

std::unique_ptr<Scorer> make_scorer(const ScorerConfig& config);
std::unique_ptr<LlmClient> make_llm(const LlmConfig& config);

/// Whole run from a config: load corpus, build clients, write output and the
/// JSON report. Returns a process exit code; only fatal config/I-O problems
/// are nonzero.
int cmd_synthesize(const PipelineConfig& config, std::ostream& log);

/// Same, with caller-supplied clients (tests, embedding).
int cmd_synthesize(const PipelineConfig& config, Scorer& scorer, LlmClient& llm, std::ostream& log);

}  // namespace doctalk
