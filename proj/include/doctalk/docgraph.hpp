#pragma once

#include "doctalk/common.hpp"
#include "doctalk/corpus.hpp"

#include <json.hpp>

#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace doctalk {

inline constexpr std::size_t kDefaultMaxDepth = 3;
inline constexpr std::size_t kDefaultMaxEdgesPerDoc = 20;
inline constexpr std::size_t kDefaultDocsPerConversation = 3;

/// Level-structured DAG rooted at an anchor document.
///
/// Vertices are stored in discovery (BFS) order; `weight` is the vertex's
/// out-degree centrality, i.e. its capped resolvable outlink count in the
/// corpus, which is also the weight of every edge pointing at it.
class DocGraph {
public:
    struct Vertex {
        std::string doc_id;
        std::size_t depth = 0;
        std::size_t weight = 0;
        std::vector<std::size_t> out;  // indices into vertices()
    };

    const std::string& anchor() const { return vertices_.front().doc_id; }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    bool contains(const std::string& doc_id) const { return index_.count(doc_id) != 0; }

    /// Throws std::out_of_range for unknown ids.
    const Vertex& vertex(const std::string& doc_id) const;
    std::size_t index_of(const std::string& doc_id) const;

    std::vector<std::pair<std::string, std::string>> edges() const;
    std::size_t edge_count() const;

    nlohmann::ordered_json to_json() const;
    static DocGraph from_json(const nlohmann::json& j);

private:
    friend DocGraph build_doc_graph(const CorpusHandle&, const std::string&, std::size_t,
                                    std::size_t);
    std::size_t add_vertex(std::string doc_id, std::size_t depth, std::size_t weight);

    std::vector<Vertex> vertices_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Breadth-first expansion from `anchor`. Each frontier vertex links to the
/// first `max_edges_per_doc` of its outlinks; targets already in the graph get
/// no edge. Vertices at `max_depth` are not expanded.
///
/// Throws std::invalid_argument if `anchor` is not in the corpus.
DocGraph build_doc_graph(const CorpusHandle& corpus, const std::string& anchor,
                         std::size_t max_depth = kDefaultMaxDepth,
                         std::size_t max_edges_per_doc = kDefaultMaxEdgesPerDoc);

/// Out-neighbour probabilities, in edge order.
using DocDistribution = std::vector<std::pair<std::string, double>>;

/// p_j = w(v_j) / sum of w over the out-neighbours of `current`; uniform when
/// every neighbour weight is zero; empty when there are no out-neighbours.
DocDistribution traversal_distribution(const DocGraph& graph, const std::string& current);

/// Weighted walk of at most `n` documents starting at the anchor.
std::vector<std::string> traverse_doc_graph(const DocGraph& graph, std::size_t n, Rng& rng);

}  // namespace doctalk
