#pragma once

#include <cstdint>

#include "duokg/kg.hpp"

namespace duokg::kg {

/// Layered graph with a planted compositional rule.
///
/// Entities sit in hops+1 layers. Relation chain_k maps layer k-1 onto layer k
/// by a random bijection, so query(e) = chain_hops(...chain_1(e)) is unique.
/// Noise relations only connect entities inside one layer. The query relation
/// never appears among the facts, so every answer needs exactly `hops` hops.
struct PlantedRuleConfig {
    std::size_t hops = 3;
    std::size_t entities_per_layer = 75;
    std::size_t noise_relations = 6;
    std::size_t noise_edges_per_entity = 2;
    double train_fraction = 0.8;
    double valid_fraction = 0.0;
    std::uint64_t seed = 1;
};

Dataset make_planted_rule(const PlantedRuleConfig& config);

/// Length of the shortest path from source to target in the graph, or -1.
int shortest_path_length(const KnowledgeGraph& graph, EntityId source, EntityId target, int limit);

}  // namespace duokg::kg
