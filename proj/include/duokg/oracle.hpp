#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "duokg/agents.hpp"
#include "duokg/kg.hpp"
#include "duokg/rng.hpp"

namespace duokg::oracle {

/// Log-probabilities over `actions` given the edges taken so far.
using PathPolicy =
    std::function<std::vector<double>(std::span<const kg::Edge> prefix, std::span<const kg::Edge> actions)>;

struct Path {
    std::vector<kg::Edge> edges;
    EntityId end;
    double log_prob = 0.0;     // summed step by step from 0
    double probability = 0.0;  // exp(log_prob)
};

/// Number of length-T walks from source (saturates at UINT64_MAX).
std::uint64_t count_paths(const kg::KnowledgeGraph& graph, EntityId source, std::size_t length);

/// Every length-T walk from source in action-space order, scored by the policy.
/// More than `limit` walks is an error that reports the count.
std::vector<Path> enumerate_paths(const kg::KnowledgeGraph& graph, EntityId source, std::size_t length,
                                  const PathPolicy& policy, std::uint64_t limit = 1'000'000);

PathPolicy uniform_policy();

/// DWARF log-probabilities after replaying the prefix with GIANT moving
/// greedily, exactly as beam search scores a hypothesis.
PathPolicy model_policy(const agents::Policy& policy, EntityId source, RelationId query);

/// Finite-horizon MDP with deterministic transitions.
struct TabularMdp {
    std::size_t num_states = 0;
    std::vector<std::vector<std::size_t>> successors;  // per state, one entry per action
    std::vector<double> reward;                        // r(s)
    std::vector<double> potential;                     // Phi(s)
    std::size_t horizon = 1;
    std::size_t target = 0;

    void validate() const;
};

enum class RewardMode { standard, shaped };

struct QTable {
    std::vector<std::vector<std::vector<double>>> q;                  // [t][s][a]
    std::vector<std::vector<std::vector<std::size_t>>> greedy_sets;   // argmax actions, ties within 1e-12
    std::vector<std::vector<std::size_t>> policy;                     // first argmax per (t, s)

    double value(std::size_t t, std::size_t s) const;
};

/// Backward induction with Q[T] = 0 and
///   Q[t][s][a] = r(s) [- alpha (Phi(s) - Phi(s'))] + max Q[t+1][s'].
QTable value_iteration(const TabularMdp& mdp, RewardMode mode, double alpha);

/// Random MDP: 2..max_states states, horizon 1..max_horizon, absorbing target
/// with reward 1 and Phi = 1, other potentials are cosines of random vectors.
TabularMdp random_mdp(Rng& rng, std::size_t max_states, std::size_t max_horizon);

struct IdentityCheck {
    std::size_t checked = 0;
    double max_error = 0.0;
};

/// Shaped return = default return - alpha (Phi(s_0) - Phi(s_T)) for every
/// stationary deterministic policy from every start state.
IdentityCheck check_policy_identity(const TabularMdp& mdp, double alpha);
/// Same identity over every action sequence of length T from every state.
IdentityCheck check_trajectory_identity(const TabularMdp& mdp, double alpha);

struct TrialReport {
    std::size_t trial = 0;
    std::size_t states = 0;
    std::size_t horizon = 0;
    double alpha = 0.0;
    bool agree = false;   // every shaped-greedy action is default-optimal
    bool strict = false;  // greedy sets identical
    double residual = 0.0;
};

struct ConsistencyReport {
    std::vector<TrialReport> trials;
    double agreement = 0.0;
    double strict_agreement = 0.0;
    IdentityCheck identity;
};

/// Per trial: identity over trajectories (and over stationary policies when
/// |S| <= 4), plus greedy agreement of shaped vs default Q. Throws if an
/// identity is violated beyond 1e-12.
ConsistencyReport shaping_consistency_check(std::uint64_t seed, double alpha, std::size_t trials,
                                            std::size_t max_states = 6, std::size_t max_horizon = 4);

void write_report(std::ostream& out, const ConsistencyReport& report);

}  // namespace duokg::oracle
