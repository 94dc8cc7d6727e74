#include <cmath>

#include "duokg/train.hpp"

namespace duokg::train {

std::vector<double> giant_step_rewards(const env::DualRollout& r, double alpha) {
    std::vector<double> out;
    out.reserve(r.steps.size());
    for (const auto& s : r.steps) out.push_back(s.r_c - alpha * s.delta);
    return out;
}

std::vector<double> dwarf_step_rewards(const env::DualRollout& r) {
    std::vector<double> out;
    out.reserve(r.steps.size());
    for (const auto& s : r.steps) out.push_back((1.0 - s.lambda) * s.r_e + s.lambda * s.distance);
    return out;
}

namespace {
double total(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}
}  // namespace

double giant_objective(const env::DualRollout& r, double alpha) { return total(giant_step_rewards(r, alpha)); }

double dwarf_objective(const env::DualRollout& r) { return total(dwarf_step_rewards(r)); }

double lambda_objective(const env::DualRollout& r) {
    double j = 0.0;
    for (const auto& s : r.steps) {
        if (!(s.lambda > 0.0 && s.lambda < 1.0)) throw NumericError("lambda_objective: lambda outside (0,1)");
        j += -(1.0 - s.label) * std::log(1.0 - s.lambda) - s.label * std::log(s.lambda);
    }
    return j;
}

std::vector<double> returns_to_go(std::span<const double> rewards) {
    std::vector<double> g(rewards.size());
    double acc = 0.0;
    for (std::size_t i = rewards.size(); i-- > 0;) {
        acc += rewards[i];
        g[i] = acc;
    }
    return g;
}

ObjectiveTotals summarize_objectives(std::span<const env::DualRollout> rollouts, const TrainConfig& cfg) {
    ObjectiveTotals o;
    if (rollouts.empty()) return o;
    std::size_t steps = 0;
    for (const auto& r : rollouts) {
        o.j_giant += giant_objective(r, cfg.alpha);
        o.j_dwarf += dwarf_objective(r);
        if (cfg.guidance) o.j_lambda += lambda_objective(r);
        for (const auto& s : r.steps) {
            o.mean_lambda += s.lambda;
            o.mean_label += s.label;
            ++steps;
        }
    }
    const double n = static_cast<double>(rollouts.size());
    o.j_giant /= n;
    o.j_dwarf /= n;
    o.j_lambda /= n;
    if (steps > 0) {
        o.mean_lambda /= static_cast<double>(steps);
        o.mean_label /= static_cast<double>(steps);
    }
    return o;
}

Baselines batch_baselines(std::span<const env::DualRollout> rollouts, const TrainConfig& cfg) {
    Baselines b;
    const std::size_t T = rollouts.empty() ? 0 : rollouts.front().steps.size();
    b.giant.assign(T, 0.0);
    b.dwarf.assign(T, 0.0);
    if (!cfg.baseline || rollouts.empty()) return b;
    for (const auto& r : rollouts) {
        if (r.steps.size() != T) throw ShapeError("batch_baselines: rollouts of different lengths");
        const auto gc = returns_to_go(giant_step_rewards(r, cfg.alpha));
        const auto ge = returns_to_go(dwarf_step_rewards(r));
        for (std::size_t t = 0; t < T; ++t) {
            b.giant[t] += gc[t];
            b.dwarf[t] += ge[t];
        }
    }
    for (std::size_t t = 0; t < T; ++t) {
        b.giant[t] /= static_cast<double>(rollouts.size());
        b.dwarf[t] /= static_cast<double>(rollouts.size());
    }
    return b;
}

}  // namespace duokg::train
