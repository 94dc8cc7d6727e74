#include <cmath>
#include <limits>
#include <string>

#include "duokg/nn/sampling.hpp"
#include "duokg/oracle.hpp"

namespace duokg::oracle {

std::uint64_t count_paths(const kg::KnowledgeGraph& graph, EntityId source, std::size_t length) {
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    std::vector<std::uint64_t> ways(graph.num_entities(), 0);
    ways[source.index()] = 1;
    for (std::size_t step = 0; step < length; ++step) {
        std::vector<std::uint64_t> next(graph.num_entities(), 0);
        for (std::size_t e = 0; e < ways.size(); ++e) {
            if (ways[e] == 0) continue;
            for (const auto& edge : graph.action_space(EntityId(static_cast<std::uint32_t>(e)))) {
                auto& slot = next[edge.target.index()];
                slot = (kMax - slot < ways[e]) ? kMax : slot + ways[e];
            }
        }
        ways = std::move(next);
    }
    std::uint64_t total = 0;
    for (auto w : ways) total = (kMax - total < w) ? kMax : total + w;
    return total;
}

namespace {

void dfs(const kg::KnowledgeGraph& graph, EntityId at, std::size_t remaining, const PathPolicy& policy,
         std::vector<kg::Edge>& prefix, double log_prob, std::vector<Path>& out) {
    if (remaining == 0) {
        out.push_back(Path{prefix, at, log_prob, std::exp(log_prob)});
        return;
    }
    const auto actions = graph.action_space(at);
    const auto lp = policy(prefix, actions);
    if (lp.size() != actions.size()) throw ShapeError("path policy returned the wrong number of log-probabilities");
    for (std::size_t a = 0; a < actions.size(); ++a) {
        prefix.push_back(actions[a]);
        dfs(graph, actions[a].target, remaining - 1, policy, prefix, log_prob + lp[a], out);
        prefix.pop_back();
    }
}

}  // namespace

std::vector<Path> enumerate_paths(const kg::KnowledgeGraph& graph, EntityId source, std::size_t length,
                                  const PathPolicy& policy, std::uint64_t limit) {
    const std::uint64_t count = count_paths(graph, source, length);
    if (count > limit) {
        throw std::length_error("enumerate_paths: " + std::to_string(count) + " paths exceed the limit of " +
                                std::to_string(limit));
    }
    std::vector<Path> out;
    out.reserve(count);
    std::vector<kg::Edge> prefix;
    dfs(graph, source, length, policy, prefix, 0.0, out);
    return out;
}

PathPolicy uniform_policy() {
    return [](std::span<const kg::Edge>, std::span<const kg::Edge> actions) {
        return std::vector<double>(actions.size(), -std::log(static_cast<double>(actions.size())));
    };
}

PathPolicy model_policy(const agents::Policy& policy, EntityId source, RelationId query) {
    return [policy, source, query](std::span<const kg::Edge> prefix, std::span<const kg::Edge> actions) {
        nn::Tape t(policy.params, false);
        agents::Walker w(t, *policy.model, policy.frozen, query);
        agents::WalkState s = w.start(source);
        for (const auto& edge : prefix) {
            const agents::Encoded enc = w.encode(s);
            const agents::Decision d = w.decide(s, enc);
            const ClusterId c = d.clusters[nn::argmax(t.value(d.giant_log_probs))];
            s = w.advance(s, enc, c, edge);
        }
        const agents::Encoded enc = w.encode(s);
        const agents::Decision d = w.decide(s, enc);
        if (d.actions.size() != actions.size()) throw ShapeError("model_policy: action lists disagree");
        const auto lp = t.value(d.dwarf_log_probs);
        return std::vector<double>(lp.begin(), lp.end());
    };
}

}  // namespace duokg::oracle
