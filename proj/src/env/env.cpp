#include <algorithm>
#include <iomanip>
#include <ostream>

#include "duokg/env.hpp"
#include "duokg/nn/ops.hpp"

namespace duokg::env {

std::vector<ClusterId> target_clusters(const embed::ClusterModel& clusters, std::span<const EntityId> answers) {
    std::vector<ClusterId> out;
    for (EntityId a : answers) out.push_back(clusters.cluster_of(a));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

InitialStates reset(const kg::QuerySample& query, const embed::ClusterModel& clusters, bool training) {
    InitialStates s;
    s.entity = EntityState{query.source, query.source, query.query_relation, 0};
    s.cluster.current = clusters.cluster_of(query.source);
    if (training) s.cluster.targets = target_clusters(clusters, query.answers);
    return s;
}

EntityState step(const kg::KnowledgeGraph& graph, const EntityState& state, kg::Edge action) {
    const auto edges = graph.action_space(state.current);
    if (!std::binary_search(edges.begin(), edges.end(), action)) {
        throw std::invalid_argument("illegal action (" + std::to_string(action.relation.value) + ", " +
                                    std::to_string(action.target.value) + ") at entity " +
                                    std::to_string(state.current.value));
    }
    EntityState next = state;
    next.current = action.target;
    ++next.step;
    return next;
}

ClusterState step(const embed::ClusterModel& clusters, const ClusterState& state, ClusterId action) {
    const auto nb = clusters.neighbors(state.current);
    if (!std::binary_search(nb.begin(), nb.end(), action)) {
        throw std::invalid_argument("illegal cluster move " + std::to_string(state.current.value) + " -> " +
                                    std::to_string(action.value));
    }
    ClusterState next = state;
    next.current = action;
    ++next.step;
    return next;
}

double default_reward(EntityId final_entity, std::span<const EntityId> answers) {
    return std::find(answers.begin(), answers.end(), final_entity) != answers.end() ? 1.0 : 0.0;
}

double default_reward(ClusterId final_cluster, std::span<const ClusterId> targets) {
    return std::find(targets.begin(), targets.end(), final_cluster) != targets.end() ? 1.0 : 0.0;
}

double state_distance(const embed::ClusterModel& clusters, ClusterId cluster, const embed::EmbeddingTable& table,
                      EntityId entity) {
    return nn::cosine_values(clusters.centroid(cluster), table.entity(entity));
}

int guidance_label(double distance, double r_c, double delta, double epsilon) {
    if (!(epsilon > 0.0)) throw ConfigError("guidance_label: epsilon must be positive");
    return distance >= delta / (r_c + epsilon) ? 0 : 1;
}

double potential(const embed::ClusterModel& clusters, ClusterId cluster, std::span<const ClusterId> targets) {
    if (targets.empty()) throw std::invalid_argument("potential: no target cluster");
    double best = -2.0;
    for (ClusterId t : targets) best = std::max(best, nn::cosine_values(clusters.centroid(cluster), clusters.centroid(t)));
    return best;
}

double shaping_delta(const embed::ClusterModel& clusters, ClusterId from, ClusterId to,
                     std::span<const ClusterId> targets) {
    if (from == to) return 0.0;
    return potential(clusters, from, targets) - potential(clusters, to, targets);
}

double entity_similarity(const embed::EmbeddingTable& table, EntityId entity, std::span<const EntityId> answers) {
    if (answers.empty()) throw std::invalid_argument("entity_similarity: no answers");
    double best = -2.0;
    for (EntityId a : answers) best = std::max(best, nn::cosine_values(table.entity(entity), table.entity(a)));
    return best;
}

void write_trace_csv(std::ostream& out, std::span<const DualRollout> rollouts, const kg::KnowledgeGraph& graph) {
    out << "query,rollout,step,entity,cluster,action,logprob_e,logprob_c,D,lambda,y,delta\n";
    out << std::setprecision(17);
    for (const auto& r : rollouts) {
        for (std::size_t t = 0; t < r.steps.size(); ++t) {
            const auto& s = r.steps[t];
            out << r.query_index << ',' << r.rollout_index << ',' << t << ',' << graph.entities().name(s.entity.value)
                << ',' << s.cluster.value << ',' << graph.relations().name(s.action.relation.value) << ':'
                << graph.entities().name(s.action.target.value) << ',' << s.logprob_e << ',' << s.logprob_c << ','
                << s.distance << ',' << s.lambda << ',' << s.label << ',' << s.delta << '\n';
        }
    }
}

}  // namespace duokg::env
