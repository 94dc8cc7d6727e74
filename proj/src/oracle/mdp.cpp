#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "duokg/oracle.hpp"

namespace duokg::oracle {

namespace {

constexpr double kTie = 1e-12;
constexpr double kIdentityTolerance = 1e-12;

double step_reward(const TabularMdp& m, RewardMode mode, double alpha, std::size_t s, std::size_t next) {
    double r = m.reward[s];
    if (mode == RewardMode::shaped) r -= alpha * (m.potential[s] - m.potential[next]);
    return r;
}

// Returns (sum of default rewards, sum of shaped rewards, final state).
struct Returns {
    double standard = 0.0;
    double shaped = 0.0;
    std::size_t last = 0;
};

void note(IdentityCheck& c, const TabularMdp& m, double alpha, std::size_t start, const Returns& r) {
    const double expect = r.standard - alpha * (m.potential[start] - m.potential[r.last]);
    c.max_error = std::max(c.max_error, std::abs(r.shaped - expect));
    ++c.checked;
}

}  // namespace

void TabularMdp::validate() const {
    if (num_states == 0 || successors.size() != num_states || reward.size() != num_states ||
        potential.size() != num_states) {
        throw ShapeError("tabular MDP: inconsistent state tables");
    }
    if (horizon == 0) throw ConfigError("tabular MDP: horizon must be positive");
    if (target >= num_states) throw ShapeError("tabular MDP: target out of range");
    for (std::size_t s = 0; s < num_states; ++s) {
        const auto& succ = successors[s];
        if (std::find(succ.begin(), succ.end(), s) == succ.end()) {
            throw ConfigError("tabular MDP: state " + std::to_string(s) + " has no self-loop");
        }
        for (auto n : succ)
            if (n >= num_states) throw ShapeError("tabular MDP: successor out of range");
        if (!(potential[s] >= -1.0 && potential[s] <= 1.0)) throw ConfigError("tabular MDP: potential outside [-1,1]");
    }
    if (potential[target] != 1.0) throw ConfigError("tabular MDP: target potential must be 1");
}

double QTable::value(std::size_t t, std::size_t s) const {
    const auto& row = q.at(t).at(s);
    return *std::max_element(row.begin(), row.end());
}

QTable value_iteration(const TabularMdp& m, RewardMode mode, double alpha) {
    m.validate();
    const std::size_t T = m.horizon, S = m.num_states;
    QTable out;
    out.q.assign(T, {});
    out.greedy_sets.assign(T, std::vector<std::vector<std::size_t>>(S));
    out.policy.assign(T, std::vector<std::size_t>(S, 0));
    std::vector<double> v_next(S, 0.0);
    for (std::size_t t = T; t-- > 0;) {
        out.q[t].assign(S, {});
        std::vector<double> v(S);
        for (std::size_t s = 0; s < S; ++s) {
            auto& row = out.q[t][s];
            for (std::size_t next : m.successors[s]) row.push_back(step_reward(m, mode, alpha, s, next) + v_next[next]);
            const double best = *std::max_element(row.begin(), row.end());
            v[s] = best;
            for (std::size_t a = 0; a < row.size(); ++a)
                if (row[a] >= best - kTie) out.greedy_sets[t][s].push_back(a);
            out.policy[t][s] = out.greedy_sets[t][s].front();
        }
        v_next = std::move(v);
    }
    return out;
}

TabularMdp random_mdp(Rng& rng, std::size_t max_states, std::size_t max_horizon) {
    if (max_states < 2 || max_horizon < 1) throw ConfigError("random_mdp: need >= 2 states and horizon >= 1");
    TabularMdp m;
    m.num_states = 2 + rng.below(max_states - 1);
    m.horizon = 1 + rng.below(max_horizon);
    m.target = m.num_states - 1;
    m.successors.assign(m.num_states, {});
    m.reward.assign(m.num_states, 0.0);
    m.reward[m.target] = 1.0;
    constexpr std::size_t dim = 3;
    std::vector<std::vector<double>> vec(m.num_states, std::vector<double>(dim));
    for (auto& v : vec) {
        double n2 = 0.0;
        while (n2 < 1e-6) {
            n2 = 0.0;
            for (auto& x : v) {
                x = rng.normal();
                n2 += x * x;
            }
        }
    }
    m.potential.resize(m.num_states);
    for (std::size_t s = 0; s < m.num_states; ++s) {
        double dot = 0.0, a = 0.0, b = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            dot += vec[s][j] * vec[m.target][j];
            a += vec[s][j] * vec[s][j];
            b += vec[m.target][j] * vec[m.target][j];
        }
        m.potential[s] = std::clamp(dot / std::sqrt(a * b), -1.0, 1.0);
    }
    m.potential[m.target] = 1.0;
    for (std::size_t s = 0; s < m.num_states; ++s) {
        auto& succ = m.successors[s];
        succ.push_back(s);
        if (s == m.target) continue;
        const std::size_t extra = 1 + rng.below(2);
        for (std::size_t k = 0; k < extra; ++k) {
            std::size_t n = rng.below(m.num_states - 1);
            if (n >= s) ++n;
            if (std::find(succ.begin(), succ.end(), n) == succ.end()) succ.push_back(n);
        }
    }
    return m;
}

IdentityCheck check_policy_identity(const TabularMdp& m, double alpha) {
    m.validate();
    IdentityCheck c;
    std::vector<std::size_t> choice(m.num_states, 0);
    for (;;) {
        for (std::size_t start = 0; start < m.num_states; ++start) {
            Returns r;
            std::size_t s = start;
            for (std::size_t t = 0; t < m.horizon; ++t) {
                const std::size_t next = m.successors[s][choice[s]];
                r.standard += step_reward(m, RewardMode::standard, alpha, s, next);
                r.shaped += step_reward(m, RewardMode::shaped, alpha, s, next);
                s = next;
            }
            r.last = s;
            note(c, m, alpha, start, r);
        }
        // odometer over per-state action choices
        std::size_t k = 0;
        while (k < m.num_states && ++choice[k] == m.successors[k].size()) choice[k++] = 0;
        if (k == m.num_states) break;
    }
    return c;
}

namespace {

void walk_all(const TabularMdp& m, double alpha, std::size_t start, std::size_t s, std::size_t depth, Returns acc,
              IdentityCheck& c) {
    if (depth == m.horizon) {
        acc.last = s;
        note(c, m, alpha, start, acc);
        return;
    }
    for (std::size_t next : m.successors[s]) {
        Returns r = acc;
        r.standard += step_reward(m, RewardMode::standard, alpha, s, next);
        r.shaped += step_reward(m, RewardMode::shaped, alpha, s, next);
        walk_all(m, alpha, start, next, depth + 1, r, c);
    }
}

}  // namespace

IdentityCheck check_trajectory_identity(const TabularMdp& m, double alpha) {
    m.validate();
    IdentityCheck c;
    for (std::size_t s = 0; s < m.num_states; ++s) walk_all(m, alpha, s, s, 0, Returns{}, c);
    return c;
}

ConsistencyReport shaping_consistency_check(std::uint64_t seed, double alpha, std::size_t trials,
                                            std::size_t max_states, std::size_t max_horizon) {
    if (trials == 0) throw ConfigError("oracle: need at least one trial");
    if (!(alpha >= 0.0)) throw ConfigError("oracle: alpha must be >= 0");
    ConsistencyReport rep;
    std::size_t agree = 0, strict = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng rng = Rng::stream(seed, {trial});
        const TabularMdp m = random_mdp(rng, max_states, max_horizon);

        IdentityCheck id = check_trajectory_identity(m, alpha);
        if (m.num_states <= 4) {
            const IdentityCheck p = check_policy_identity(m, alpha);
            id.checked += p.checked;
            id.max_error = std::max(id.max_error, p.max_error);
        }
        rep.identity.checked += id.checked;
        rep.identity.max_error = std::max(rep.identity.max_error, id.max_error);
        if (id.max_error > kIdentityTolerance) {
            throw std::logic_error("shaping identity violated in trial " + std::to_string(trial));
        }

        const QTable q = value_iteration(m, RewardMode::standard, alpha);
        const QTable qs = value_iteration(m, RewardMode::shaped, alpha);
        TrialReport tr;
        tr.trial = trial;
        tr.states = m.num_states;
        tr.horizon = m.horizon;
        tr.alpha = alpha;
        tr.agree = true;
        tr.strict = true;
        for (std::size_t t = 0; t < m.horizon; ++t) {
            for (std::size_t s = 0; s < m.num_states; ++s) {
                const auto& a = q.greedy_sets[t][s];
                const auto& b = qs.greedy_sets[t][s];
                if (a != b) tr.strict = false;
                for (auto x : b)
                    if (std::find(a.begin(), a.end(), x) == a.end()) tr.agree = false;
                for (std::size_t act = 0; act < m.successors[s].size(); ++act) {
                    // follow the shaped-greedy continuation to find Phi at the horizon
                    std::size_t cur = m.successors[s][act];
                    for (std::size_t u = t + 1; u < m.horizon; ++u) cur = m.successors[cur][qs.policy[u][cur]];
                    const double expect = q.q[t][s][act] - alpha * m.potential[s] + alpha * m.potential[cur];
                    tr.residual = std::max(tr.residual, std::abs(qs.q[t][s][act] - expect));
                }
            }
        }
        agree += tr.agree ? 1 : 0;
        strict += tr.strict ? 1 : 0;
        rep.trials.push_back(tr);
    }
    rep.agreement = static_cast<double>(agree) / static_cast<double>(trials);
    rep.strict_agreement = static_cast<double>(strict) / static_cast<double>(trials);
    return rep;
}

void write_report(std::ostream& out, const ConsistencyReport& rep) {
    out << "trial  |S|  T  alpha    agree  strict  max|Qs-(Q-a*Phi(s)+a*Phi_T)|\n";
    for (const auto& t : rep.trials) {
        out << std::setw(5) << t.trial << std::setw(5) << t.states << std::setw(3) << t.horizon << "  "
            << std::setw(7) << std::fixed << std::setprecision(4) << t.alpha << "  " << std::setw(5)
            << (t.agree ? "yes" : "no") << "  " << std::setw(6) << (t.strict ? "yes" : "no") << "  "
            << std::scientific << std::setprecision(3) << t.residual << '\n';
    }
    out.unsetf(std::ios::floatfield);
    out << std::setprecision(6);
    out << "identity checks: " << rep.identity.checked << ", max error " << rep.identity.max_error << '\n';
    out << "greedy agreement: " << rep.agreement * 100.0 << "% (identical argmax sets: " << rep.strict_agreement * 100.0
        << "%)\n";
}

}  // namespace duokg::oracle
