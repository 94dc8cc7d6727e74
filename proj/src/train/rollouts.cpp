#include <cmath>
#include <omp.h>

#include "duokg/nn/sampling.hpp"
#include "duokg/train.hpp"

namespace duokg::train {

void TrainConfig::validate() const {
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (path_length == 0) throw ConfigError("path_length must be at least 1");
    if (rollouts_train == 0 || rollouts_test == 0) throw ConfigError("rollout counts must be positive");
    if (beam_size == 0) throw ConfigError("beam_size must be positive");
    if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
    if (!(delta >= 0.0)) throw ConfigError("delta must be >= 0");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
    if (!(entropy_beta >= 0.0)) throw ConfigError("entropy_beta must be >= 0");
    if (workers == 0) throw ConfigError("workers must be at least 1");
}

namespace {

std::vector<double> probabilities(nn::Tape& t, nn::Var log_probs) {
    const auto lp = t.value(log_probs);
    std::vector<double> p(lp.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(lp[i]);
    return p;
}

}  // namespace

env::DualRollout sample_rollout(const agents::Policy& policy, const kg::QuerySample& query, const TrainConfig& cfg,
                                Rng& rng) {
    const auto& clusters = *policy.frozen.clusters;
    const auto& table = *policy.frozen.table;
    nn::Tape t(policy.params, false);
    agents::Walker w(t, *policy.model, policy.frozen, query.query_relation);

    env::DualRollout r;
    r.source = query.source;
    r.query = query.query_relation;
    r.answers = query.answers;
    r.targets = env::target_clusters(clusters, query.answers);
    std::vector<kg::Edge> masked;
    if (cfg.mask_query_edges) {
        for (EntityId a : query.answers) masked.push_back(kg::Edge{query.query_relation, a});
    }

    agents::WalkState s = w.start(query.source);
    agents::Encoded enc = w.encode(s);
    r.phi_start = env::potential(clusters, s.cluster, r.targets);
    const std::size_t T = cfg.path_length;
    for (std::size_t step = 0; step < T; ++step) {
        const agents::Decision d = w.decide(s, enc, query.source, masked);
        const auto pc = probabilities(t, d.giant_log_probs);
        const auto pe = probabilities(t, d.dwarf_log_probs);
        env::StepRecord rec;
        rec.entity = s.entity;
        rec.cluster = s.cluster;
        rec.cluster_index = nn::categorical_sample(pc, rng);
        rec.action_index = nn::categorical_sample(pe, rng);
        rec.cluster_action = d.clusters[rec.cluster_index];
        rec.action = d.actions[rec.action_index];
        rec.logprob_c = t.value(d.giant_log_probs)[rec.cluster_index];
        rec.logprob_e = t.value(d.dwarf_log_probs)[rec.action_index];

        agents::WalkState next = w.advance(s, enc, rec.cluster_action, rec.action);
        const bool terminal = step + 1 == T;
        agents::Encoded next_enc;
        if (!terminal || cfg.guidance) next_enc = w.encode(next);
        rec.lambda = cfg.guidance ? t.item(w.lambda(next, next_enc)) : 0.0;
        rec.r_e = terminal ? env::default_reward(next.entity, r.answers) : 0.0;
        rec.r_c = terminal ? env::default_reward(next.cluster, r.targets) : 0.0;
        rec.distance = env::state_distance(clusters, next.cluster, table, next.entity);
        rec.label = env::guidance_label(rec.distance, rec.r_c, cfg.delta, cfg.epsilon);
        rec.delta = env::shaping_delta(clusters, s.cluster, next.cluster, r.targets);
        r.steps.push_back(rec);
        s = std::move(next);
        enc = std::move(next_enc);
    }
    r.final_entity = s.entity;
    r.final_cluster = s.cluster;
    r.phi_end = env::potential(clusters, s.cluster, r.targets);
    return r;
}

std::vector<env::DualRollout> collect_rollouts(const agents::Policy& policy, std::span<const kg::QuerySample> batch,
                                               const TrainConfig& cfg, std::size_t epoch, std::size_t first_query,
                                               std::size_t k) {
    std::vector<env::DualRollout> out(batch.size() * k);
    const auto total = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(static_cast<int>(cfg.workers))
    for (std::int64_t i = 0; i < total; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const std::size_t q = u / k, j = u % k;
        Rng rng = Rng::stream(cfg.seed, {epoch, first_query + q, j});
        out[u] = sample_rollout(policy, batch[q], cfg, rng);
        out[u].query_index = first_query + q;
        out[u].rollout_index = j;
    }
    return out;
}

std::vector<env::DualRollout> collect_rollouts_reference(const agents::Policy& policy,
                                                         std::span<const kg::QuerySample> batch,
                                                         const TrainConfig& cfg, std::size_t epoch,
                                                         std::size_t first_query, std::size_t k) {
    std::vector<env::DualRollout> out;
    for (std::size_t q = 0; q < batch.size(); ++q) {
        for (std::size_t j = 0; j < k; ++j) {
            Rng rng = Rng::stream(cfg.seed, {epoch, first_query + q, j});
            out.push_back(sample_rollout(policy, batch[q], cfg, rng));
            out.back().query_index = first_query + q;
            out.back().rollout_index = j;
        }
    }
    return out;
}

}  // namespace duokg::train
