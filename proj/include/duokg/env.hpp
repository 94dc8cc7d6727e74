#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "duokg/embed.hpp"
#include "duokg/kg.hpp"

namespace duokg::env {

struct EntityState {
    EntityId current;
    EntityId source;
    RelationId query;
    std::size_t step = 0;
};

struct ClusterState {
    ClusterId current;
    std::vector<ClusterId> targets;  // sorted; empty outside training
    std::size_t step = 0;
};

struct InitialStates {
    EntityState entity;
    ClusterState cluster;
};

/// Both walkers at the query source. Targets are the clusters of all answers
/// when `training` is set.
InitialStates reset(const kg::QuerySample& query, const embed::ClusterModel& clusters, bool training);

/// Deterministic transitions; an action outside the current action space throws.
EntityState step(const kg::KnowledgeGraph& graph, const EntityState& state, kg::Edge action);
ClusterState step(const embed::ClusterModel& clusters, const ClusterState& state, ClusterId action);

/// Sorted unique clusters of the given entities.
std::vector<ClusterId> target_clusters(const embed::ClusterModel& clusters, std::span<const EntityId> answers);

/// 1 if the final node is one of the answers (targets), else 0.
double default_reward(EntityId final_entity, std::span<const EntityId> answers);
double default_reward(ClusterId final_cluster, std::span<const ClusterId> targets);

/// Cosine between the centroid of the cluster and the entity vector.
double state_distance(const embed::ClusterModel& clusters, ClusterId cluster, const embed::EmbeddingTable& table,
                      EntityId entity);

/// 0 when D >= delta / (r_c + epsilon), otherwise 1.
int guidance_label(double distance, double r_c, double delta, double epsilon);

/// Max over targets of the cosine between cluster centroids.
double potential(const embed::ClusterModel& clusters, ClusterId cluster, std::span<const ClusterId> targets);

/// Phi(from) - Phi(to).
double shaping_delta(const embed::ClusterModel& clusters, ClusterId from, ClusterId to,
                     std::span<const ClusterId> targets);

/// Max over answers of the cosine between entity vectors.
double entity_similarity(const embed::EmbeddingTable& table, EntityId entity, std::span<const EntityId> answers);

/// One synchronized step. Entity and cluster are the pre-action state s_t;
/// rewards, D, lambda and y are evaluated at the post-action state s_{t+1}.
struct StepRecord {
    EntityId entity;
    ClusterId cluster;
    kg::Edge action;
    ClusterId cluster_action;
    std::size_t action_index = 0;
    std::size_t cluster_index = 0;
    double logprob_e = 0.0;
    double logprob_c = 0.0;
    double r_e = 0.0;
    double r_c = 0.0;
    double distance = 0.0;
    double lambda = 0.0;
    int label = 1;
    double delta = 0.0;
};

struct DualRollout {
    std::size_t query_index = 0;
    std::size_t rollout_index = 0;
    EntityId source;
    RelationId query;
    std::vector<EntityId> answers;
    std::vector<ClusterId> targets;
    std::vector<StepRecord> steps;
    EntityId final_entity;
    ClusterId final_cluster;
    double phi_start = 0.0;
    double phi_end = 0.0;

    std::size_t horizon() const { return steps.size(); }
};

/// query,rollout,step,entity,cluster,action,logprob_e,logprob_c,D,lambda,y,delta
void write_trace_csv(std::ostream& out, std::span<const DualRollout> rollouts, const kg::KnowledgeGraph& graph);

}  // namespace duokg::env
