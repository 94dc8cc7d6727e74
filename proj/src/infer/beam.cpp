#include <algorithm>
#include <limits>
#include <tuple>

#include "duokg/infer.hpp"
#include "duokg/nn/sampling.hpp"

namespace duokg::infer {

namespace {

struct Hypothesis {
    agents::WalkState state;
    double log_prob = 0.0;
};

struct Candidate {
    std::size_t parent;
    std::size_t action;
    EntityId entity;
    double log_prob;
};

}  // namespace

std::vector<RankedEntity> rank_endpoints(std::span<const std::pair<EntityId, double>> paths) {
    std::vector<RankedEntity> out;
    std::vector<std::pair<EntityId, double>> sorted(paths.begin(), paths.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [e, s] : sorted) {
        if (out.empty() || out.back().entity != e) {
            out.push_back(RankedEntity{e, s});
        } else {
            out.back().score = std::max(out.back().score, s);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const RankedEntity& a, const RankedEntity& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.entity < b.entity;
    });
    return out;
}

std::vector<RankedEntity> beam_search(const agents::Policy& policy, EntityId source, RelationId query,
                                      const BeamConfig& config) {
    if (config.width == 0) throw ConfigError("beam width must be positive");
    nn::Tape t(policy.params, false);
    agents::Walker w(t, *policy.model, policy.frozen, query);
    std::vector<Hypothesis> beam{{w.start(source), 0.0}};
    for (std::size_t step = 0; step < config.path_length; ++step) {
        std::vector<agents::Encoded> encs;
        std::vector<agents::Decision> decs;
        std::vector<ClusterId> next_cluster;
        std::vector<Candidate> cands;
        for (std::size_t h = 0; h < beam.size(); ++h) {
            encs.push_back(w.encode(beam[h].state));
            decs.push_back(w.decide(beam[h].state, encs.back()));
            const auto& d = decs.back();
            next_cluster.push_back(d.clusters[nn::argmax(t.value(d.giant_log_probs))]);
            const auto lp = t.value(d.dwarf_log_probs);
            for (std::size_t a = 0; a < d.actions.size(); ++a) {
                cands.push_back(Candidate{h, a, d.actions[a].target, beam[h].log_prob + lp[a]});
            }
        }
        std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
            if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
            return std::tie(a.entity, a.parent, a.action) < std::tie(b.entity, b.parent, b.action);
        });
        if (cands.size() > config.width) cands.resize(config.width);
        std::vector<Hypothesis> next;
        next.reserve(cands.size());
        for (const auto& c : cands) {
            const auto& parent = beam[c.parent];
            next.push_back(Hypothesis{
                w.advance(parent.state, encs[c.parent], next_cluster[c.parent], decs[c.parent].actions[c.action]),
                c.log_prob});
        }
        beam = std::move(next);
    }
    std::vector<std::pair<EntityId, double>> ends;
    for (const auto& h : beam) ends.emplace_back(h.state.entity, h.log_prob);
    return rank_endpoints(ends);
}

std::size_t rank_of(std::span<const RankedEntity> ranking, EntityId gold, std::size_t missing_rank) {
    for (std::size_t i = 0; i < ranking.size(); ++i)
        if (ranking[i].entity == gold) return i + 1;
    return missing_rank;
}

std::size_t filtered_rank_of(std::span<const RankedEntity> ranking, EntityId gold, std::span<const EntityId> filter,
                             std::size_t missing_rank) {
    std::size_t rank = 1;
    for (const auto& r : ranking) {
        if (r.entity == gold) return rank;
        if (std::find(filter.begin(), filter.end(), r.entity) == filter.end()) ++rank;
    }
    return missing_rank;
}

}  // namespace duokg::infer
