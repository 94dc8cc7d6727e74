#include <algorithm>

#include "duokg/agents.hpp"

namespace duokg::agents {

Walker::Walker(Tape& t, const PolicyModel& m, const Frozen& f, RelationId query)
    : t_(t), m_(m), f_(f), query_(query) {
    query_vec_ = relation_vector(query);
}

Var Walker::entity_vector(EntityId e) { return t_.constant(f_.table->entity(e)); }

Var Walker::relation_vector(RelationId r) { return nn::row(t_, t_.param(m_.dwarf.relations), r.index()); }

Var Walker::cluster_embedding(ClusterId c) {
    return nn::concat(t_, {t_.constant(f_.clusters->centroid(c)),
                           nn::row(t_, t_.param(m_.giant.cluster_learned), c.index())});
}

Var Walker::cluster_rows(std::span<const ClusterId> ids) {
    const std::size_t d = m_.shape.dim;
    std::vector<double> cents;
    std::vector<std::uint32_t> idx;
    cents.reserve(ids.size() * d);
    for (ClusterId c : ids) {
        const auto v = f_.clusters->centroid(c);
        cents.insert(cents.end(), v.begin(), v.end());
        idx.push_back(c.value);
    }
    const Var centroids = t_.constant(nn::Shape{ids.size(), d}, std::move(cents));
    return nn::hconcat(t_, {centroids, nn::gather_rows(t_, t_.param(m_.giant.cluster_learned), idx)});
}

Var Walker::action_rows(std::span<const kg::Edge> edges) {
    const std::size_t d = m_.shape.dim;
    std::vector<double> ents;
    std::vector<std::uint32_t> rels;
    ents.reserve(edges.size() * d);
    for (const auto& e : edges) {
        const auto v = f_.table->entity(e.target);
        ents.insert(ents.end(), v.begin(), v.end());
        rels.push_back(e.relation.value);
    }
    const Var entity_rows = t_.constant(nn::Shape{edges.size(), d}, std::move(ents));
    return nn::hconcat(t_, {nn::gather_rows(t_, t_.param(m_.dwarf.relations), rels), entity_rows});
}

WalkState Walker::start(EntityId source) {
    WalkState s;
    s.entity = source;
    s.cluster = f_.clusters->cluster_of(source);
    s.last_relation = f_.graph->no_op();
    s.step = 0;
    s.dwarf_lstm = nn::zero_state(t_, m_.dwarf.lstm);
    s.giant_lstm = nn::zero_state(t_, m_.giant.lstm);
    const std::size_t d = m_.shape.dim;
    s.h_e = t_.zeros(2 * d);
    s.h_c = t_.zeros(2 * d);
    s.atn_prev = t_.zeros(d);
    s.a_e_prev = nn::concat(t_, {relation_vector(s.last_relation), entity_vector(source)});
    s.a_c_prev = cluster_embedding(s.cluster);
    return s;
}

Encoded Walker::encode(const WalkState& s) {
    Encoded e;
    e.atn = dwarf_attention(t_, m_, f_, s.entity);
    e.giant_lstm = giant_encode(t_, m_, s.giant_lstm, s.a_c_prev, s.h_c, s.h_e);
    e.dwarf_lstm = dwarf_encode(t_, m_, s.dwarf_lstm, s.a_e_prev, s.h_e, s.atn_prev, s.h_c);
    return e;
}

Var Walker::giant_log_probs(const WalkState& s, const Encoded& enc, const std::vector<ClusterId>& clusters) {
    return giant_head(t_, m_, cluster_embedding(s.cluster), enc.h_c(), cluster_rows(clusters));
}

Decision Walker::decide(const WalkState& s, const Encoded& enc, std::optional<EntityId> masked_source,
                        std::span<const kg::Edge> masked) {
    Decision d;
    const auto nb = f_.clusters->neighbors(s.cluster);
    d.clusters.assign(nb.begin(), nb.end());
    const auto edges = f_.graph->action_space(s.entity);
    if (masked_source && *masked_source == s.entity && !masked.empty()) {
        for (const auto& e : edges) {
            if (std::find(masked.begin(), masked.end(), e) == masked.end()) d.actions.push_back(e);
        }
    } else {
        d.actions.assign(edges.begin(), edges.end());
    }
    d.giant_log_probs = giant_log_probs(s, enc, d.clusters);
    const DwarfInputs in{entity_vector(s.entity), relation_vector(s.last_relation), query_vec_, enc.atn};
    d.dwarf_log_probs = dwarf_head(t_, m_, in, enc.h_e(), action_rows(d.actions));
    return d;
}

WalkState Walker::advance(const WalkState& s, const Encoded& enc, ClusterId next_cluster, kg::Edge action) {
    WalkState n;
    n.entity = action.target;
    n.cluster = next_cluster;
    n.last_relation = action.relation;
    n.step = s.step + 1;
    n.dwarf_lstm = enc.dwarf_lstm;
    n.giant_lstm = enc.giant_lstm;
    n.h_e = enc.h_e();
    n.h_c = enc.h_c();
    n.atn_prev = enc.atn;
    n.a_e_prev = nn::concat(t_, {relation_vector(action.relation), entity_vector(action.target)});
    n.a_c_prev = cluster_embedding(next_cluster);
    return n;
}

Var Walker::lambda(const WalkState& s, const Encoded& enc) {
    const Var features = nn::detach(t_, nn::concat(t_, {entity_vector(s.entity), query_vec_, enc.h_e()}));
    return lambda_value(t_, m_, features);
}

}  // namespace duokg::agents
