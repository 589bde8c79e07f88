#include "doctalk/docgraph.hpp"

#include <algorithm>
#include <stdexcept>

namespace doctalk {

const DocGraph::Vertex& DocGraph::vertex(const std::string& doc_id) const {
    return vertices_[index_of(doc_id)];
}

std::size_t DocGraph::index_of(const std::string& doc_id) const {
    const auto it = index_.find(doc_id);
    if (it == index_.end()) {
        throw std::out_of_range("vertex not in document graph: " + doc_id);
    }
    return it->second;
}

std::size_t DocGraph::add_vertex(std::string doc_id, std::size_t depth, std::size_t weight) {
    const std::size_t idx = vertices_.size();
    index_.emplace(doc_id, idx);
    vertices_.push_back(Vertex{std::move(doc_id), depth, weight, {}});
    return idx;
}

std::vector<std::pair<std::string, std::string>> DocGraph::edges() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(edge_count());
    for (const auto& v : vertices_) {
        for (auto dst : v.out) out.emplace_back(v.doc_id, vertices_[dst].doc_id);
    }
    return out;
}

std::size_t DocGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& v : vertices_) n += v.out.size();
    return n;
}

nlohmann::ordered_json DocGraph::to_json() const {
    auto verts = nlohmann::ordered_json::array();
    auto weights = nlohmann::ordered_json::object();
    auto depths = nlohmann::ordered_json::object();
    for (const auto& v : vertices_) {
        verts.push_back(v.doc_id);
        weights[v.doc_id] = v.weight;
        depths[v.doc_id] = v.depth;
    }
    auto edges_json = nlohmann::ordered_json::array();
    for (const auto& [src, dst] : edges()) edges_json.push_back({src, dst});
    nlohmann::ordered_json j;
    j["anchor"] = anchor();
    j["vertices"] = std::move(verts);
    j["weights"] = std::move(weights);
    j["depths"] = std::move(depths);
    j["edges"] = std::move(edges_json);
    return j;
}

DocGraph DocGraph::from_json(const nlohmann::json& j) {
    DocGraph g;
    const auto& weights = j.at("weights");
    const auto& depths = j.at("depths");
    for (const auto& id : j.at("vertices")) {
        const auto name = id.get<std::string>();
        if (g.contains(name)) {
            throw std::invalid_argument("duplicate vertex in graph cache: " + name);
        }
        g.add_vertex(name, depths.at(name).get<std::size_t>(), weights.at(name).get<std::size_t>());
    }
    if (g.vertices_.empty() || g.anchor() != j.at("anchor").get<std::string>()) {
        throw std::invalid_argument("graph cache: anchor must be the first vertex");
    }
    for (const auto& e : j.at("edges")) {
        const auto src = g.index_of(e.at(0).get<std::string>());
        const auto dst = g.index_of(e.at(1).get<std::string>());
        if (g.vertices_[dst].depth != g.vertices_[src].depth + 1) {
            throw std::invalid_argument("graph cache: edge does not descend one level");
        }
        g.vertices_[src].out.push_back(dst);
    }
    return g;
}

DocGraph build_doc_graph(const CorpusHandle& corpus, const std::string& anchor,
                         std::size_t max_depth, std::size_t max_edges_per_doc) {
    if (!corpus.contains(anchor)) {
        throw std::invalid_argument("anchor not in corpus: " + anchor);
    }
    auto capped_outlinks = [&](const std::string& id) {
        const auto& links = corpus.at(id).outlinks;
        return std::span<const std::string>(links).first(std::min(links.size(), max_edges_per_doc));
    };

    DocGraph g;
    g.add_vertex(anchor, 0, capped_outlinks(anchor).size());
    std::vector<std::size_t> frontier{0};
    for (std::size_t depth = 0; depth < max_depth && !frontier.empty(); ++depth) {
        std::vector<std::size_t> next;
        for (const auto src : frontier) {
            for (const auto& target : capped_outlinks(g.vertices_[src].doc_id)) {
                if (g.contains(target)) continue;
                const auto dst = g.add_vertex(target, depth + 1, capped_outlinks(target).size());
                g.vertices_[src].out.push_back(dst);
                next.push_back(dst);
            }
        }
        frontier = std::move(next);
    }
    return g;
}

DocDistribution traversal_distribution(const DocGraph& graph, const std::string& current) {
    const auto& v = graph.vertex(current);
    DocDistribution dist;
    if (v.out.empty()) return dist;

    double total = 0.0;
    for (const auto j : v.out) total += static_cast<double>(graph.vertices()[j].weight);
    dist.reserve(v.out.size());
    for (const auto j : v.out) {
        const auto& nb = graph.vertices()[j];
        const double p = total > 0.0 ? static_cast<double>(nb.weight) / total
                                     : 1.0 / static_cast<double>(v.out.size());
        dist.emplace_back(nb.doc_id, p);
    }
    return dist;
}

std::vector<std::string> traverse_doc_graph(const DocGraph& graph, std::size_t n, Rng& rng) {
    if (n < 1) {
        throw std::invalid_argument("traverse_doc_graph: n must be >= 1");
    }
    std::vector<std::string> path{graph.anchor()};
    std::vector<double> probs;
    while (path.size() < n) {
        const auto dist = traversal_distribution(graph, path.back());
        if (dist.empty()) break;
        probs.clear();
        for (const auto& [_, p] : dist) probs.push_back(p);
        path.push_back(dist[sample_categorical(probs, rng)].first);
    }
    return path;
}

}  // namespace doctalk
