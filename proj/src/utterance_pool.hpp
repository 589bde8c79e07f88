#pragma once

#include "doctalk/common.hpp"
#include "doctalk/conversation.hpp"

#include <algorithm>
#include <cstddef>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace doctalk::detail {

// Every assistant utterance of a dataset, flattened conversation by
// conversation so each conversation owns one contiguous range.
class UtterancePool {
public:
    explicit UtterancePool(const std::vector<Conversation>& convs) {
        begin_.reserve(convs.size() + 1);
        for (const auto& c : convs) {
            begin_.push_back(texts_.size());
            for (const auto& t : c.turns) texts_.push_back(t.assistant_text);
        }
        begin_.push_back(texts_.size());
    }

    std::string_view text(std::size_t flat) const { return texts_[flat]; }
    std::size_t conversation_begin(std::size_t conv) const { return begin_[conv]; }
    std::size_t conversation_size(std::size_t conv) const { return begin_[conv + 1] - begin_[conv]; }
    std::size_t others_count(std::size_t conv) const { return texts_.size() - conversation_size(conv); }

    // Up to `count` distinct utterances from conversations other than `conv`,
    // as ascending flat indices. The draw is the first `count` positions of a
    // seeded shuffle of the complement, so for a given rng state a smaller
    // sample is always contained in a larger one.
    std::vector<std::size_t> sample_others(std::size_t conv, std::size_t count, Rng& rng) const {
        const std::size_t avail = others_count(conv);
        std::vector<std::size_t> picked;
        if (count >= avail) {
            picked.resize(avail);
            for (std::size_t i = 0; i < avail; ++i) picked[i] = map_other(conv, i);
            return picked;
        }
        // Sparse Fisher-Yates: only displaced positions are stored.
        std::unordered_map<std::size_t, std::size_t> swapped;
        auto at = [&](std::size_t i) {
            const auto it = swapped.find(i);
            return it == swapped.end() ? i : it->second;
        };
        picked.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t j = i + uniform_index(rng, avail - i);
            const std::size_t vi = at(i), vj = at(j);
            swapped[j] = vi;
            picked.push_back(map_other(conv, vj));
        }
        std::sort(picked.begin(), picked.end());
        return picked;
    }

private:
    std::size_t map_other(std::size_t conv, std::size_t i) const {
        return i < begin_[conv] ? i : i + conversation_size(conv);
    }

    std::vector<std::string_view> texts_;
    std::vector<std::size_t> begin_;
};

// Indices of the k highest scores, descending, ties in input order.
inline std::vector<std::size_t> top_k_indices(const std::vector<double>& scores, std::size_t k) {
    std::vector<std::size_t> idx(scores.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    if (idx.size() > k) idx.resize(k);
    return idx;
}

}  // namespace doctalk::detail
