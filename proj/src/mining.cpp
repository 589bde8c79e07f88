#include "doctalk/reward.hpp"

#include "utterance_pool.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace doctalk {

std::string_view to_string(NegativeSource s) {
    switch (s) {
        case NegativeSource::SameConversation: return "same_conversation";
        case NegativeSource::CrossConversationMined: return "cross_conversation_mined";
        case NegativeSource::Random: return "random";
    }
    return "unknown";
}

NegativeSource negative_source_from_string(std::string_view s) {
    if (s == "same_conversation") return NegativeSource::SameConversation;
    if (s == "cross_conversation_mined") return NegativeSource::CrossConversationMined;
    if (s == "random") return NegativeSource::Random;
    throw std::invalid_argument("unknown negative source tag: " + std::string(s));
}

nlohmann::ordered_json to_json(const TrainingTriple& t) {
    nlohmann::ordered_json j;
    j["base"] = t.base;
    j["positive"] = t.positive;
    j["negatives"] = t.negatives;
    auto& tags = j["negative_sources"] = nlohmann::ordered_json::array();
    for (auto s : t.negative_sources) tags.push_back(to_string(s));
    return j;
}

TrainingTriple triple_from_json(const nlohmann::json& j) {
    TrainingTriple t;
    t.base = j.at("base").get<std::string>();
    t.positive = j.at("positive").get<std::string>();
    t.negatives = j.at("negatives").get<std::vector<std::string>>();
    for (const auto& tag : j.at("negative_sources")) {
        t.negative_sources.push_back(negative_source_from_string(tag.get<std::string>()));
    }
    if (t.negatives.size() != t.negative_sources.size()) {
        throw std::invalid_argument("triple: negatives and negative_sources differ in length");
    }
    return t;
}

namespace {

std::optional<TrainingTriple> mine_one(const std::vector<Conversation>& convs,
                                       const detail::UtterancePool& pool, std::size_t ci,
                                       Scorer& scorer, const MiningOptions& opt) {
    const auto& turns = convs[ci].turns;
    Rng rng(derive_seed(opt.seed, "mine:" + std::to_string(ci) + ":" + convs[ci].conv_id));
    const std::size_t base = uniform_index(rng, turns.size() - 1);

    TrainingTriple triple;
    triple.conversation_index = ci;
    triple.base = turns[base].assistant_text;
    triple.positive = turns[base + 1].assistant_text;
    if (triple.base == triple.positive) return std::nullopt;

    std::unordered_set<std::string_view> seen{triple.base, triple.positive};
    auto add = [&](std::string_view text, NegativeSource source) {
        if (!seen.insert(text).second) return;
        triple.negatives.emplace_back(text);
        triple.negative_sources.push_back(source);
    };

    // (a) hard negatives inside the same conversation
    std::vector<std::string_view> same;
    for (std::size_t t = 0; t < turns.size(); ++t) {
        if (t != base && t != base + 1) same.push_back(turns[t].assistant_text);
    }
    if (!same.empty()) {
        const auto scores = scorer.score_batch(triple.base, std::span<const std::string_view>(same));
        for (auto i : detail::top_k_indices(scores, opt.k)) add(same[i], NegativeSource::SameConversation);
    }

    // (b) hard negatives from a sampled cross-conversation pool
    const auto cross = pool.sample_others(ci, opt.cross_pool_size, rng);
    if (!cross.empty()) {
        std::vector<std::string_view> texts;
        texts.reserve(cross.size());
        for (auto f : cross) texts.push_back(pool.text(f));
        const auto scores = scorer.score_batch(triple.base, std::span<const std::string_view>(texts));
        for (auto i : detail::top_k_indices(scores, opt.k)) {
            add(texts[i], NegativeSource::CrossConversationMined);
        }
    }

    // (c) random utterances from other conversations
    for (auto f : pool.sample_others(ci, opt.k, rng)) add(pool.text(f), NegativeSource::Random);
    return triple;
}

}  // namespace

MiningResult mine_training_triples(const std::vector<Conversation>& conversations, Scorer& scorer,
                                   const MiningOptions& options) {
    if (options.k < 1) {
        throw std::invalid_argument("mine_training_triples: k must be >= 1");
    }
    const detail::UtterancePool pool(conversations);
    std::vector<std::optional<TrainingTriple>> slots(conversations.size());
    parallel_for(conversations.size(), options.workers, [&](std::size_t ci) {
        if (conversations[ci].turns.size() >= 2) {
            slots[ci] = mine_one(conversations, pool, ci, scorer, options);
        }
    });
    MiningResult result;
    for (auto& s : slots) {
        if (s) {
            result.triples.push_back(std::move(*s));
        } else {
            ++result.skipped;
        }
    }
    return result;
}

}  // namespace doctalk
