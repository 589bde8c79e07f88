#pragma once

#include "doctalk/conversation.hpp"
#include "doctalk/corpus.hpp"
#include "doctalk/usergen.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace doctalk {

inline constexpr std::size_t kVariantMaxTurns = 30;
inline constexpr std::size_t kVariantReplicas = 3;

/// Deterministic id from (anchor_id, global seed).
std::string make_conv_id(const std::string& anchor_id, std::uint64_t global_seed);

struct AssemblyMeta {
    std::string anchor_id;
    std::vector<std::string> source_doc_ids;
    std::uint64_t global_seed = 0;
    std::string scorer_id;
    std::string template_id;
    std::string created_at;
};

/// Pairs segments with their questions into turns 1..m. Throws
/// std::invalid_argument on a length mismatch, an empty input, a duplicate
/// source, or a question that fails validation.
Conversation assemble_conversation(const std::vector<Segment>& ordered_segments,
                                   const std::vector<UserUtterance>& user_utterances,
                                   const AssemblyMeta& meta);

/// Number of adjacent turn pairs whose source documents differ.
std::size_t count_doc_shifts(const Conversation& conv);

/// Re-segments each turn's source document and compares text byte for byte.
/// Returns the number of turns that do not match (0 means pure).
std::size_t purity_violations(const Conversation& conv, const CorpusHandle& corpus,
                              std::size_t min_words = kDefaultMinWords);

struct SummaryStats {
    double mean = 0.0;
    double std = 0.0;  // population
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

/// Mean, population std, and median of a sample. Throws on an empty sample.
SummaryStats summarize(std::vector<double> values);

struct CorpusStats {
    std::size_t conversation_count = 0;
    SummaryStats turns;
    SummaryStats assistant_words;
    SummaryStats user_words;
    SummaryStats doc_shifts;
};

/// Mergeable accumulator over a conversation stream. Keeps the raw values so
/// medians are exact.
class StatsAccumulator {
public:
    void add(const Conversation& conv);
    void merge(const StatsAccumulator& other);
    std::size_t conversations() const { return turns_.size(); }
    /// Throws std::invalid_argument when nothing was added.
    CorpusStats finish() const;

private:
    std::vector<double> turns_;
    std::vector<double> assistant_words_;
    std::vector<double> user_words_;
    std::vector<double> doc_shifts_;
};

CorpusStats compute_stats(const std::vector<Conversation>& dataset);

/// Report with one row per metric (turns, assistant words, user words, doc shifts).
nlohmann::ordered_json to_json(const CorpusStats& stats);

/// First `max_turns` turns of each conversation, emitted `replicas` times with
/// a "-r<k>" suffix on conv_id (replica-major order).
std::vector<Conversation> truncate_variant(const std::vector<Conversation>& dataset,
                                           std::size_t max_turns = kVariantMaxTurns,
                                           std::size_t replicas = kVariantReplicas);

}  // namespace doctalk
