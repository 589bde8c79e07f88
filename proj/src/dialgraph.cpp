#include "doctalk/dialgraph.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>

namespace doctalk {

TraversalState::TraversalState(const DialGraph& graph)
    : current(graph.start), visited(graph.segments.size(), false) {
    visit(graph.start);
}

void TraversalState::visit(std::size_t v) {
    if (visited.at(v)) {
        throw std::logic_error("dialogue vertex visited twice");
    }
    visited[v] = true;
    order.push_back(v);
    current = v;
}

DialGraph build_dial_graph(const std::vector<std::string>& sampled_docs, const CorpusHandle& corpus,
                           std::size_t min_words) {
    if (sampled_docs.empty()) {
        throw std::invalid_argument("build_dial_graph: no documents");
    }
    DialGraph g;
    for (const auto& id : sampled_docs) {
        auto segs = segment_document(corpus.at(id), min_words);
        std::move(segs.begin(), segs.end(), std::back_inserter(g.segments));
    }
    if (g.segments.empty()) {
        throw std::invalid_argument("empty dialogue graph");
    }
    // First segment of the anchor, or of the first document that has any.
    g.start = 0;
    return g;
}

DialDistribution next_step_distribution(const TraversalState& state, const DialGraph& graph,
                                        Scorer& scorer) {
    std::vector<std::size_t> candidates;
    std::vector<std::string_view> texts;
    candidates.reserve(state.remaining());
    texts.reserve(state.remaining());
    for (std::size_t v = 0; v < graph.segments.size(); ++v) {
        if (state.visited[v]) continue;
        candidates.push_back(v);
        texts.push_back(graph.segments[v].text);
    }
    if (candidates.empty()) {
        throw std::logic_error("next_step_distribution: every vertex already visited");
    }
    const auto scores = scorer.score_batch(graph.segments[state.current].text,
                                           std::span<const std::string_view>(texts));
    if (scores.size() != candidates.size()) {
        throw ProtocolError("scorer returned the wrong number of scores");
    }
    double z = 0.0;
    std::vector<double> r(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        // NaN also lands on the floor.
        r[i] = scores[i] > kScoreFloor ? scores[i] : kScoreFloor;
        z += r[i];
    }
    DialDistribution dist;
    dist.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) dist.emplace_back(candidates[i], r[i] / z);
    return dist;
}

std::vector<std::size_t> traverse_dial_graph(const DialGraph& graph, Scorer& scorer,
                                             std::optional<std::size_t> m, Rng& rng) {
    const std::size_t total = graph.segments.size();
    const std::size_t target = m.value_or(total);
    if (target < 1 || target > total) {
        throw std::invalid_argument("traverse_dial_graph: m must be in [1, |segments|]");
    }
    TraversalState state(graph);
    std::vector<double> probs;
    while (state.order.size() < target) {
        DialDistribution dist;
        try {
            dist = next_step_distribution(state, graph, scorer);
        } catch (const Error& e) {
            throw DialTraversalError(std::string("dialogue traversal aborted after ") +
                                         std::to_string(state.order.size()) + " steps: " + e.what(),
                                     state.order);
        }
        probs.clear();
        for (const auto& [_, p] : dist) probs.push_back(p);
        state.visit(dist[sample_categorical(probs, rng)].first);
    }
    return state.order;
}

}  // namespace doctalk
