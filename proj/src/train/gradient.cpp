#include <algorithm>
#include <cmath>
#include <string>

#include "duokg/train.hpp"

namespace duokg::train {

namespace {

constexpr std::size_t kChunks = 16;

struct Replay {
    std::vector<nn::Var> logprob_e;
    std::vector<nn::Var> logprob_c;
    std::vector<nn::Var> lambda;
    std::vector<nn::Var> entropy;
};

Replay replay(nn::Tape& t, const agents::Policy& policy, const env::DualRollout& r, const TrainConfig& cfg) {
    agents::Walker w(t, *policy.model, policy.frozen, r.query);
    std::vector<kg::Edge> masked;
    if (cfg.mask_query_edges) {
        for (EntityId a : r.answers) masked.push_back(kg::Edge{r.query, a});
    }
    Replay out;
    agents::WalkState s = w.start(r.source);
    agents::Encoded enc = w.encode(s);
    const std::size_t T = r.steps.size();
    for (std::size_t step = 0; step < T; ++step) {
        const auto& rec = r.steps[step];
        const agents::Decision d = w.decide(s, enc, r.source, masked);
        if (rec.action_index >= d.actions.size() || d.actions[rec.action_index] != rec.action ||
            rec.cluster_index >= d.clusters.size() || d.clusters[rec.cluster_index] != rec.cluster_action) {
            throw std::logic_error("replay diverged from the recorded rollout at step " + std::to_string(step));
        }
        out.logprob_e.push_back(nn::pick(t, d.dwarf_log_probs, rec.action_index));
        out.logprob_c.push_back(nn::pick(t, d.giant_log_probs, rec.cluster_index));
        if (cfg.entropy_beta > 0.0) {
            out.entropy.push_back(nn::add(t, nn::entropy_from_log_probs(t, d.dwarf_log_probs),
                                          nn::entropy_from_log_probs(t, d.giant_log_probs)));
        }
        agents::WalkState next = w.advance(s, enc, rec.cluster_action, rec.action);
        const bool terminal = step + 1 == T;
        agents::Encoded next_enc;
        if (!terminal || cfg.guidance) next_enc = w.encode(next);
        if (cfg.guidance) out.lambda.push_back(w.lambda(next, next_enc));
        s = std::move(next);
        enc = std::move(next_enc);
    }
    return out;
}

// Surrogate loss of one rollout, already divided by the batch size.
nn::Var rollout_loss(nn::Tape& t, const agents::Policy& policy, const env::DualRollout& r, const TrainConfig& cfg,
                     const Baselines& b, double inv_n) {
    const Replay rp = replay(t, policy, r, cfg);
    const auto ge = returns_to_go(dwarf_step_rewards(r));
    const auto gc = returns_to_go(giant_step_rewards(r, cfg.alpha));
    std::vector<nn::Var> terms;
    for (std::size_t step = 0; step < r.steps.size(); ++step) {
        terms.push_back(nn::scale(t, rp.logprob_e[step], -(ge[step] - b.dwarf[step])));
        terms.push_back(nn::scale(t, rp.logprob_c[step], -(gc[step] - b.giant[step])));
        if (cfg.guidance) {
            terms.push_back(nn::bernoulli_cross_entropy(t, rp.lambda[step], static_cast<double>(r.steps[step].label)));
        }
        if (cfg.entropy_beta > 0.0) terms.push_back(nn::scale(t, rp.entropy[step], -cfg.entropy_beta));
    }
    return nn::scale(t, nn::sum(t, nn::concat(t, std::span<const nn::Var>(terms))), inv_n);
}

}  // namespace

GradientResult policy_gradient(const agents::Policy& policy, std::span<const env::DualRollout> rollouts,
                               const TrainConfig& cfg) {
    GradientResult res;
    res.grads = policy.params->make_gradients();
    if (rollouts.empty()) return res;
    const Baselines b = batch_baselines(rollouts, cfg);
    const double inv_n = 1.0 / static_cast<double>(rollouts.size());
    const std::size_t n = rollouts.size();
    const std::size_t chunks = std::min(kChunks, n);
    std::vector<nn::Gradients> partial(chunks);
    std::vector<double> losses(chunks, 0.0);
    const auto count = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(static_cast<int>(cfg.workers))
    for (std::int64_t c = 0; c < count; ++c) {
        const auto u = static_cast<std::size_t>(c);
        partial[u] = policy.params->make_gradients();
        const std::size_t lo = u * n / chunks, hi = (u + 1) * n / chunks;
        for (std::size_t i = lo; i < hi; ++i) {
            nn::Tape t(policy.params, true);
            const nn::Var loss = rollout_loss(t, policy, rollouts[i], cfg, b, inv_n);
            losses[u] += t.item(loss);
            t.backward(loss, partial[u]);
        }
    }
    for (std::size_t c = 0; c < chunks; ++c) {
        res.grads.accumulate(partial[c]);
        res.loss += losses[c];
    }
    if (!res.grads.all_finite()) throw NumericError("policy_gradient: non-finite gradient");
    return res;
}

GradientResult policy_gradient_reference(const agents::Policy& policy, std::span<const env::DualRollout> rollouts,
                                         const TrainConfig& cfg) {
    GradientResult res;
    res.grads = policy.params->make_gradients();
    if (rollouts.empty()) return res;
    const Baselines b = batch_baselines(rollouts, cfg);
    const double inv_n = 1.0 / static_cast<double>(rollouts.size());
    for (const auto& r : rollouts) {
        nn::Tape t(policy.params, true);
        const nn::Var loss = rollout_loss(t, policy, r, cfg, b, inv_n);
        res.loss += t.item(loss);
        t.backward(loss, res.grads);
    }
    if (!res.grads.all_finite()) throw NumericError("policy_gradient: non-finite gradient");
    return res;
}

double replay_discrepancy(const agents::Policy& policy, const env::DualRollout& r, const TrainConfig& cfg) {
    nn::Tape t(policy.params, false);
    const Replay rp = replay(t, policy, r, cfg);
    double worst = 0.0;
    for (std::size_t step = 0; step < r.steps.size(); ++step) {
        worst = std::max(worst, std::abs(t.item(rp.logprob_e[step]) - r.steps[step].logprob_e));
        worst = std::max(worst, std::abs(t.item(rp.logprob_c[step]) - r.steps[step].logprob_c));
        if (cfg.guidance) worst = std::max(worst, std::abs(t.item(rp.lambda[step]) - r.steps[step].lambda));
    }
    return worst;
}

}  // namespace duokg::train
