#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "duokg/agents.hpp"
#include "duokg/env.hpp"
#include "duokg/nn/optim.hpp"

namespace duokg::train {

struct TrainConfig {
    std::size_t batch_size = 128;
    double learning_rate = 0.01;
    std::size_t path_length = 3;
    std::size_t rollouts_train = 20;
    std::size_t rollouts_test = 100;
    std::size_t beam_size = 100;
    double alpha = 0.15;
    double delta = 0.20;
    double epsilon = 0.1;
    double entropy_beta = 0.0;
    bool baseline = true;
    /// Off: lambda is fixed at 0 and the lambda network is not trained.
    bool guidance = true;
    /// Remove the (source, query, answer) edges from the source's actions while training.
    bool mask_query_edges = true;
    std::size_t epochs = 10;
    std::uint64_t seed = 1;
    std::size_t workers = 1;

    void validate() const;
};

/// One sampled trajectory with all per-step records filled. Parameters are
/// read only; no gradient is recorded.
env::DualRollout sample_rollout(const agents::Policy& policy, const kg::QuerySample& query, const TrainConfig& config,
                                Rng& rng);

/// K rollouts per query. Rollout k of query q draws from the stream
/// (seed, epoch, first_query + q, k), so results do not depend on scheduling.
std::vector<env::DualRollout> collect_rollouts(const agents::Policy& policy, std::span<const kg::QuerySample> batch,
                                               const TrainConfig& config, std::size_t epoch, std::size_t first_query,
                                               std::size_t k);
/// Serial version kept as the reference.
std::vector<env::DualRollout> collect_rollouts_reference(const agents::Policy& policy,
                                                         std::span<const kg::QuerySample> batch,
                                                         const TrainConfig& config, std::size_t epoch,
                                                         std::size_t first_query, std::size_t k);

// Per-rollout objectives on recorded values.
std::vector<double> giant_step_rewards(const env::DualRollout& r, double alpha);   // r_c - alpha * delta
std::vector<double> dwarf_step_rewards(const env::DualRollout& r);                 // (1-l) r_e + l D
double giant_objective(const env::DualRollout& r, double alpha);
double dwarf_objective(const env::DualRollout& r);
double lambda_objective(const env::DualRollout& r);
std::vector<double> returns_to_go(std::span<const double> rewards);

struct ObjectiveTotals {
    double j_giant = 0.0;
    double j_dwarf = 0.0;
    double j_lambda = 0.0;
    double mean_lambda = 0.0;
    double mean_label = 0.0;
};

/// Batch means of the three objectives and of lambda / y.
ObjectiveTotals summarize_objectives(std::span<const env::DualRollout> rollouts, const TrainConfig& config);

/// Baseline per step: batch mean of the return-to-go (zeros when disabled).
struct Baselines {
    std::vector<double> giant;
    std::vector<double> dwarf;
};
Baselines batch_baselines(std::span<const env::DualRollout> rollouts, const TrainConfig& config);

struct GradientResult {
    nn::Gradients grads;
    /// Mean surrogate loss whose gradient is `grads`.
    double loss = 0.0;
};

/// Replays every rollout on a recording tape and accumulates the gradient of
///   mean over rollouts of [ -sum A_e log pi_e - sum A_c log pi_c
///                           + sum BCE(lambda, y) - beta * entropy ].
/// Rollouts are reduced through fixed chunks in index order, so the result
/// is bitwise independent of the worker count.
GradientResult policy_gradient(const agents::Policy& policy, std::span<const env::DualRollout> rollouts,
                               const TrainConfig& config);
/// Plain sequential sum; the reference for policy_gradient.
GradientResult policy_gradient_reference(const agents::Policy& policy, std::span<const env::DualRollout> rollouts,
                                         const TrainConfig& config);

/// Replay check: recomputes a rollout's log-probabilities and lambdas from the
/// current parameters; returns the largest absolute difference to the record.
double replay_discrepancy(const agents::Policy& policy, const env::DualRollout& r, const TrainConfig& config);

struct EpochMetrics {
    std::size_t epoch = 0;
    double j_giant = 0.0;
    double j_dwarf = 0.0;
    double j_lambda = 0.0;
    double css = 0.0;
    double ess = 0.0;
    double mean_lambda = 0.0;
    double hits1_valid = 0.0;  // NaN when there is no validation split
};

/// Hook for validation Hits@1; returns NaN when unavailable.
using ValidationHook = std::function<double(const nn::ParamStore&)>;
using EpochHook = std::function<void(const EpochMetrics&, std::span<const env::DualRollout>)>;

/// Runs the epochs of collect -> objectives -> Adam updates.
class Trainer {
public:
    Trainer(nn::ParamStore& store, const agents::PolicyModel& model, agents::Frozen frozen, TrainConfig config);

    EpochMetrics run_epoch(std::size_t epoch, std::span<const kg::QuerySample> queries);
    std::vector<EpochMetrics> run(std::span<const kg::QuerySample> queries, const ValidationHook& validate = {},
                                  const EpochHook& on_epoch = {});

    agents::Policy policy() const { return {&model_, &store_, frozen_}; }
    /// Rollouts collected during the last epoch.
    const std::vector<env::DualRollout>& last_rollouts() const { return last_rollouts_; }
    const TrainConfig& config() const { return config_; }

private:
    nn::ParamStore& store_;
    const agents::PolicyModel& model_;
    agents::Frozen frozen_;
    TrainConfig config_;
    nn::Adam adam_;
    std::vector<env::DualRollout> last_rollouts_;
};

/// '#' header lines echo alpha and delta, then
/// epoch,J_giant,J_dwarf,J_lambda,CSS,ESS,mean_lambda,hits1_valid
void write_metrics_csv(std::ostream& out, const TrainConfig& config, std::span<const EpochMetrics> rows);
std::vector<EpochMetrics> read_metrics_csv(std::istream& in);

}  // namespace duokg::train
