#pragma once

#include "doctalk/common.hpp"
#include "doctalk/conversation.hpp"
#include "doctalk/scorer.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace doctalk {

enum class NegativeSource { SameConversation, CrossConversationMined, Random };

std::string_view to_string(NegativeSource s);
NegativeSource negative_source_from_string(std::string_view s);

/// Contrastive training example for the conversational-reward model.
struct TrainingTriple {
    std::string base;
    std::string positive;
    std::vector<std::string> negatives;
    std::vector<NegativeSource> negative_sources;  // parallel to negatives
    std::size_t conversation_index = 0;            // not serialized
};

nlohmann::ordered_json to_json(const TrainingTriple& t);
TrainingTriple triple_from_json(const nlohmann::json& j);

struct MiningOptions {
    std::size_t k = 2;
    /// Utterances sampled from other conversations and scored for bucket (b).
    std::size_t cross_pool_size = 200;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

struct MiningResult {
    std::vector<TrainingTriple> triples;
    std::size_t skipped = 0;  // conversations with < 2 assistant utterances
};

/// One triple per usable conversation. The base is a uniformly random
/// assistant utterance other than the last and the positive is the one after
/// it. Negatives, deduplicated in this order:
///   (a) top-k same-conversation utterances by scorer(base, .)
///   (b) top-k of a sampled cross-conversation pool by scorer(base, .)
///   (c) k uniformly random utterances from other conversations
/// Each conversation draws from its own stream derived from (seed, index).
MiningResult mine_training_triples(const std::vector<Conversation>& conversations, Scorer& scorer,
                                   const MiningOptions& options);

/// 1-based rank of `target` when `scores` are sorted descending with ties
/// kept in input order.
std::size_t stable_rank(std::span<const double> scores, std::size_t target);

struct PoolSizeStats {
    std::size_t min = 0;
    std::size_t max = 0;
    double mean = 0.0;
};

struct MrrReport {
    std::vector<double> per_conversation_rr;
    double mean_rr = 0.0;
    PoolSizeStats pool_size_stats;
    std::size_t skipped = 0;
};

nlohmann::ordered_json to_json(const MrrReport& r);

struct MrrOptions {
    std::size_t distractors_per_query = 20;
    /// Score every consecutive (base, next) pair instead of one random pair.
    bool all_pairs = false;
    std::uint64_t seed = 0;
};

/// Next-utterance ranking quality. For each query the pool is the true next
/// utterance plus every other assistant utterance of the conversation (the
/// base excluded, conversation order) followed by distractors drawn from other
/// conversations. Throws std::invalid_argument on an empty input or when no
/// conversation is usable.
MrrReport evaluate_mrr(Scorer& scorer, const std::vector<Conversation>& conversations,
                       const MrrOptions& options);

}  // namespace doctalk
