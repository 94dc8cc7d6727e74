#include <algorithm>
#include <cmath>

#include "duokg/embed.hpp"

namespace duokg::embed {

std::vector<std::vector<ClusterId>> build_cluster_graph(const kg::KnowledgeGraph& graph,
                                                        std::span<const std::uint32_t> assignment,
                                                        std::size_t num_clusters) {
    if (assignment.size() != graph.num_entities()) {
        throw ShapeError("build_cluster_graph: assignment covers " + std::to_string(assignment.size()) +
                         " entities, graph has " + std::to_string(graph.num_entities()));
    }
    std::vector<std::vector<ClusterId>> adj(num_clusters);
    for (std::size_t c = 0; c < num_clusters; ++c) adj[c].push_back(ClusterId(static_cast<std::uint32_t>(c)));
    for (std::size_t e = 0; e < graph.num_entities(); ++e) {
        const std::uint32_t a = assignment[e];
        if (a >= num_clusters) throw std::out_of_range("build_cluster_graph: cluster id out of range");
        for (const auto& edge : graph.action_space(EntityId(static_cast<std::uint32_t>(e)))) {
            adj[a].push_back(ClusterId(assignment[edge.target.index()]));
        }
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

std::vector<double> ClusterModel::embedding(ClusterId c) const {
    std::vector<double> v(2 * dim);
    const auto a = centroid(c);
    const auto b = learned_part(c);
    std::copy(a.begin(), a.end(), v.begin());
    std::copy(b.begin(), b.end(), v.begin() + static_cast<std::ptrdiff_t>(dim));
    return v;
}

ClusterModel make_cluster_model(const kg::KnowledgeGraph& graph, const EmbeddingTable& table,
                                const KMeansConfig& config) {
    if (table.num_entities != graph.num_entities()) {
        throw ShapeError("cluster model: embedding table and graph disagree on the entity count");
    }
    const KMeansResult km = kmeans(table.entities, table.num_entities, table.dim, config);
    ClusterModel m;
    m.num_clusters = config.clusters;
    m.dim = table.dim;
    m.assignment = km.assignment;
    m.centroids = km.centroids;
    Rng rng = Rng::stream(config.seed, {0x6c6561726eULL});
    const double bound = 1.0 / std::sqrt(static_cast<double>(table.dim));
    m.learned.resize(m.num_clusters * m.dim);
    for (auto& v : m.learned) v = rng.uniform(-bound, bound);
    m.adjacency = build_cluster_graph(graph, m.assignment, m.num_clusters);
    return m;
}

}  // namespace duokg::embed
