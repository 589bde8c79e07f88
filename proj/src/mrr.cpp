#include "doctalk/reward.hpp"

#include "utterance_pool.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace doctalk {

std::size_t stable_rank(std::span<const double> scores, std::size_t target) {
    if (target >= scores.size()) {
        throw std::out_of_range("stable_rank: target outside the pool");
    }
    const double s = scores[target];
    std::size_t rank = 1;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] > s || (i < target && scores[i] == s)) ++rank;
    }
    return rank;
}

nlohmann::ordered_json to_json(const MrrReport& r) {
    nlohmann::ordered_json j;
    j["mean_rr"] = r.mean_rr;
    j["queries"] = r.per_conversation_rr.size();
    j["skipped"] = r.skipped;
    j["pool_size"] = {{"min", r.pool_size_stats.min},
                      {"max", r.pool_size_stats.max},
                      {"mean", r.pool_size_stats.mean}};
    j["per_conversation_rr"] = r.per_conversation_rr;
    return j;
}

MrrReport evaluate_mrr(Scorer& scorer, const std::vector<Conversation>& conversations,
                       const MrrOptions& options) {
    if (conversations.empty()) {
        throw std::invalid_argument("evaluate_mrr: no conversations");
    }
    const detail::UtterancePool pool(conversations);
    MrrReport report;
    std::vector<std::size_t> pool_sizes;

    for (std::size_t ci = 0; ci < conversations.size(); ++ci) {
        const auto& turns = conversations[ci].turns;
        if (turns.size() < 2) {
            ++report.skipped;
            continue;
        }
        Rng rng(derive_seed(options.seed, "mrr:" + std::to_string(ci) + ":" + conversations[ci].conv_id));
        std::vector<std::size_t> bases;
        if (options.all_pairs) {
            bases.resize(turns.size() - 1);
            std::iota(bases.begin(), bases.end(), std::size_t{0});
        } else {
            bases.push_back(uniform_index(rng, turns.size() - 1));
        }
        for (const auto base : bases) {
            std::vector<std::string_view> candidates;
            std::size_t target = 0;
            for (std::size_t t = 0; t < turns.size(); ++t) {
                if (t == base) continue;
                if (t == base + 1) target = candidates.size();
                candidates.push_back(turns[t].assistant_text);
            }
            for (auto f : pool.sample_others(ci, options.distractors_per_query, rng)) {
                candidates.push_back(pool.text(f));
            }
            const auto scores = scorer.score_batch(turns[base].assistant_text,
                                                   std::span<const std::string_view>(candidates));
            if (scores.size() != candidates.size()) {
                throw ProtocolError("scorer returned the wrong number of scores");
            }
            report.per_conversation_rr.push_back(1.0 / static_cast<double>(stable_rank(scores, target)));
            pool_sizes.push_back(candidates.size());
        }
    }
    if (report.per_conversation_rr.empty()) {
        throw std::invalid_argument("evaluate_mrr: no conversation has two assistant utterances");
    }
    // Extended-precision sum so identical reciprocal ranks average back to themselves exactly.
    long double sum = 0.0L;
    for (double rr : report.per_conversation_rr) sum += rr;
    report.mean_rr = static_cast<double>(sum / static_cast<long double>(report.per_conversation_rr.size()));
    const auto [mn, mx] = std::minmax_element(pool_sizes.begin(), pool_sizes.end());
    report.pool_size_stats.min = *mn;
    report.pool_size_stats.max = *mx;
    report.pool_size_stats.mean = static_cast<double>(std::accumulate(pool_sizes.begin(), pool_sizes.end(), std::size_t{0})) /
                                  static_cast<double>(pool_sizes.size());
    return report;
}

}  // namespace doctalk
