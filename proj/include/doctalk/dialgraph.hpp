#pragma once

#include "doctalk/common.hpp"
#include "doctalk/corpus.hpp"
#include "doctalk/scorer.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace doctalk {

/// Complete directed graph (no self loops) over the segments of the sampled
/// documents. Edges are implicit; a vertex is an index into `segments`.
struct DialGraph {
    std::vector<Segment> segments;  // document order, then seg_index order
    std::size_t start = 0;
};

/// Walk state: the current vertex plus everything already emitted.
struct TraversalState {
    std::size_t current = 0;
    std::vector<bool> visited;
    std::vector<std::size_t> order;

    explicit TraversalState(const DialGraph& graph);
    void visit(std::size_t v);
    std::size_t remaining() const { return visited.size() - order.size(); }
};

/// Segments every document in `sampled_docs` order. Documents that yield no
/// segments are skipped; start is the anchor's first segment when it has one.
/// Throws std::invalid_argument ("empty dialogue graph") if nothing survives.
DialGraph build_dial_graph(const std::vector<std::string>& sampled_docs, const CorpusHandle& corpus,
                           std::size_t min_words = kDefaultMinWords);

using DialDistribution = std::vector<std::pair<std::size_t, double>>;

/// Scores every unvisited vertex against the current segment in one batch.
/// Raw scores are floored at kScoreFloor, then normalized.
DialDistribution next_step_distribution(const TraversalState& state, const DialGraph& graph,
                                        Scorer& scorer);

/// Thrown when the scorer fails mid-walk; carries the order built so far.
class DialTraversalError : public ScorerError {
public:
    DialTraversalError(const std::string& what, std::vector<std::size_t> partial)
        : ScorerError(what), partial_order(std::move(partial)) {}
    std::vector<std::size_t> partial_order;
};

/// Scorer-proportional walk with single-use vertices. `m` = nullopt visits
/// every vertex. Returns vertex indices in visit order.
std::vector<std::size_t> traverse_dial_graph(const DialGraph& graph, Scorer& scorer,
                                             std::optional<std::size_t> m, Rng& rng);

}  // namespace doctalk
