#include <algorithm>
#include <numeric>
#include <queue>

#include "duokg/rng.hpp"
#include "duokg/synthetic.hpp"

namespace duokg::kg {

Dataset make_planted_rule(const PlantedRuleConfig& cfg) {
    if (cfg.hops == 0 || cfg.entities_per_layer < 2) throw ConfigError("planted rule needs hops >= 1 and >= 2 entities per layer");
    if (cfg.train_fraction <= 0.0 || cfg.train_fraction + cfg.valid_fraction > 1.0) {
        throw ConfigError("planted rule split fractions out of range");
    }
    Rng rng(cfg.seed);
    Dataset ds;
    const std::size_t layers = cfg.hops + 1;
    const std::size_t per = cfg.entities_per_layer;
    auto entity = [&](std::size_t layer, std::size_t i) {
        return EntityId(static_cast<std::uint32_t>(layer * per + i));
    };
    for (std::size_t l = 0; l < layers; ++l) {
        for (std::size_t i = 0; i < per; ++i) ds.entities.intern("L" + std::to_string(l) + "_" + std::to_string(i));
    }
    std::vector<RelationId> chain;
    for (std::size_t k = 1; k <= cfg.hops; ++k) chain.emplace_back(ds.relations.intern("chain_" + std::to_string(k)));
    const RelationId query(ds.relations.intern("query"));
    std::vector<RelationId> noise;
    for (std::size_t k = 0; k < cfg.noise_relations; ++k) noise.emplace_back(ds.relations.intern("noise_" + std::to_string(k)));

    // chain bijections: next[l][i] = index in layer l+1
    std::vector<std::vector<std::size_t>> next(cfg.hops, std::vector<std::size_t>(per));
    for (std::size_t l = 0; l < cfg.hops; ++l) {
        std::iota(next[l].begin(), next[l].end(), std::size_t{0});
        for (std::size_t i = per - 1; i > 0; --i) std::swap(next[l][i], next[l][rng.below(i + 1)]);
        for (std::size_t i = 0; i < per; ++i) ds.facts.push_back(Triple{entity(l, i), chain[l], entity(l + 1, next[l][i])});
    }
    if (!noise.empty()) {
        for (std::size_t l = 0; l < layers; ++l) {
            for (std::size_t i = 0; i < per; ++i) {
                for (std::size_t k = 0; k < cfg.noise_edges_per_entity; ++k) {
                    std::size_t j = rng.below(per - 1);
                    if (j >= i) ++j;
                    ds.facts.push_back(Triple{entity(l, i), noise[rng.below(noise.size())], entity(l, j)});
                }
            }
        }
    }

    std::vector<std::size_t> sources(per);
    std::iota(sources.begin(), sources.end(), std::size_t{0});
    for (std::size_t i = per - 1; i > 0; --i) std::swap(sources[i], sources[rng.below(i + 1)]);
    const auto n_train = static_cast<std::size_t>(cfg.train_fraction * static_cast<double>(per) + 0.5);
    const auto n_valid = static_cast<std::size_t>(cfg.valid_fraction * static_cast<double>(per) + 0.5);
    for (std::size_t q = 0; q < per; ++q) {
        std::size_t i = sources[q];
        std::size_t cur = i;
        for (std::size_t l = 0; l < cfg.hops; ++l) cur = next[l][cur];
        Triple t{entity(0, i), query, entity(cfg.hops, cur)};
        if (q < n_train) {
            ds.train.push_back(t);
        } else if (q < n_train + n_valid) {
            ds.valid.push_back(t);
        } else {
            ds.test.push_back(t);
        }
    }
    return ds;
}

int shortest_path_length(const KnowledgeGraph& graph, EntityId source, EntityId target, int limit) {
    std::vector<int> dist(graph.num_entities(), -1);
    std::queue<EntityId> frontier;
    dist[source.index()] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
        const auto e = frontier.front();
        frontier.pop();
        if (e == target) return dist[e.index()];
        if (dist[e.index()] >= limit) continue;
        for (const auto& edge : graph.action_space(e)) {
            if (dist[edge.target.index()] < 0) {
                dist[edge.target.index()] = dist[e.index()] + 1;
                frontier.push(edge.target);
            }
        }
    }
    return -1;
}

}  // namespace duokg::kg
