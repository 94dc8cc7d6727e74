#pragma once

// Single-step GIANT, DWARF and lambda objectives evaluated from random
// recurrent states, for gradient checks of the complete networks.

#include "duokg/nn/grad_check.hpp"
#include "support/generators.hpp"

namespace objectives {

using namespace duokg;

enum class Kind { giant, dwarf, lambda };

inline const char* name(Kind k) { return k == Kind::giant ? "giant_step" : k == Kind::dwarf ? "dwarf_step" : "lambda"; }

/// Random previous state: every layer gets nonzero hidden and cell vectors.
inline nn::LstmState random_state(nn::Tape& t, const nn::LstmStack& stack, Rng& rng) {
    nn::LstmState s;
    for (std::size_t l = 0; l < stack.layers.size(); ++l)
        s.layers.push_back({t.constant(gen::vector(rng, stack.hidden_size)), t.constant(gen::vector(rng, stack.hidden_size))});
    return s;
}

/// log pi of one sampled candidate after a full step (recurrent update and
/// head), or the lambda cross-entropy. Inputs are redrawn from `seed` on
/// every evaluation.
inline nn::ScalarFunction step(Kind kind, const agents::PolicyModel& model, agents::Frozen frozen,
                               kg::QuerySample query, std::uint64_t seed) {
    return [=, &model](nn::Tape& t) -> nn::Var {
        Rng rng(seed);
        const std::size_t d = model.shape.dim;
        agents::Walker w(t, model, frozen, query.query_relation);
        if (kind == Kind::lambda) {
            const auto feats = t.constant(gen::vector(rng, 4 * d, 2.0));
            return nn::bernoulli_cross_entropy(t, agents::lambda_value(t, model, feats), rng.uniform());
        }
        const auto h_c = t.constant(gen::vector(rng, 2 * d));
        const auto h_e = t.constant(gen::vector(rng, 2 * d));
        if (kind == Kind::giant) {
            const auto prev = random_state(t, model.giant.lstm, rng);
            const ClusterId here = frozen.clusters->cluster_of(query.source);
            const auto nb = frozen.clusters->neighbors(here);
            const std::vector<ClusterId> cands(nb.begin(), nb.end());
            const auto r = agents::giant_step(t, model, prev, w.cluster_embedding(ClusterId(rng.below(model.shape.num_clusters))),
                                              h_c, h_e, w.cluster_embedding(here), w.cluster_rows(cands));
            return nn::pick(t, r.log_probs, rng.below(cands.size()));
        }
        const auto prev = random_state(t, model.dwarf.lstm, rng);
        const auto edges = frozen.graph->action_space(query.source);
        const std::vector<kg::Edge> cands(edges.begin(), edges.end());
        const auto atn_prev = agents::dwarf_attention(t, model, frozen, cands.front().target);
        const agents::DwarfInputs in{w.entity_vector(query.source), w.relation_vector(cands.back().relation),
                                     w.relation_vector(query.query_relation),
                                     agents::dwarf_attention(t, model, frozen, query.source)};
        const auto prev_action = nn::concat(t, {w.relation_vector(cands.back().relation), w.entity_vector(cands.back().target)});
        const auto r = agents::dwarf_step(t, model, prev, prev_action, h_e, atn_prev, h_c, in, w.action_rows(cands));
        return nn::pick(t, r.log_probs, rng.below(cands.size()));
    };
}

/// Parameters the objective of `kind` depends on.
inline std::vector<nn::ParamId> params_of(Kind kind, const nn::ParamStore& store) {
    const char* prefix = kind == Kind::giant ? "giant." : kind == Kind::dwarf ? "dwarf." : "lambda.";
    std::vector<nn::ParamId> ids;
    for (std::uint32_t i = 0; i < store.count(); ++i)
        if (store.name({i}).rfind(prefix, 0) == 0) ids.push_back({i});
    return ids;
}

/// Relative-error floor for the full networks. Gradients three LSTM layers
/// deep reach 1e-9 while finite differences carry about 1e-11 of rounding
/// noise, so tinier entries are compared on an absolute scale of 1e-10.
inline constexpr double kFloor = 1e-6;
/// Finite-difference step; small enough that no ReLU kink is crossed at the
/// sampled points, large enough to keep rounding noise near 1e-11.
inline constexpr double kStep = 3e-5;

/// Max relative gradient error of one objective at one random point.
inline nn::GradCheckResult check(Kind kind, std::uint64_t point) {
    Rng rng(500 + point);
    const auto w = gen::world(rng, 12, 3, 30, 3, 3);
    nn::ParamStore store(point);
    const auto model = agents::PolicyModel::create(store, w.table, w.clusters);
    const auto q = gen::queries(w, 4);
    const auto f = step(kind, model, w.frozen(), q[point % q.size()], 77 + point);
    return nn::grad_check(store, f, kStep, params_of(kind, store), kFloor);
}

}  // namespace objectives
