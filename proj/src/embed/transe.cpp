#include <cmath>
#include <numeric>

#include "duokg/embed.hpp"
#include "duokg/log.hpp"

namespace duokg::embed {

namespace {

void normalize_rows(std::vector<double>& m, std::size_t dim) {
    for (std::size_t off = 0; off < m.size(); off += dim) {
        double n2 = 0.0;
        for (std::size_t j = 0; j < dim; ++j) n2 += m[off + j] * m[off + j];
        if (n2 == 0.0) continue;
        const double inv = 1.0 / std::sqrt(n2);
        for (std::size_t j = 0; j < dim; ++j) m[off + j] *= inv;
    }
}

// residual h + r - t and its norm
double residual(const double* h, const double* r, const double* t, std::size_t dim, std::vector<double>& out) {
    double n2 = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        out[j] = h[j] + r[j] - t[j];
        n2 += out[j] * out[j];
    }
    return std::sqrt(n2);
}

kg::Triple corrupt(const kg::Triple& t, std::size_t num_entities, Rng& rng) {
    kg::Triple c = t;
    const EntityId e(static_cast<std::uint32_t>(rng.below(num_entities)));
    if (rng.coin()) {
        c.head = e;
    } else {
        c.tail = e;
    }
    return c;
}

}  // namespace

double transe_score(const EmbeddingTable& table, EntityId h, RelationId r, EntityId t) {
    const auto hv = table.entity(h);
    const auto rv = table.relation(r);
    const auto tv = table.entity(t);
    double n2 = 0.0;
    for (std::size_t j = 0; j < table.dim; ++j) {
        const double v = hv[j] + rv[j] - tv[j];
        n2 += v * v;
    }
    return -std::sqrt(n2);
}

EmbeddingTable transe_train(std::span<const kg::Triple> facts, std::size_t num_entities,
                            std::size_t num_base_relations, const TransEConfig& cfg, TransEReport* report) {
    if (cfg.dim == 0) throw ConfigError("transe: embedding dimension must be positive");
    if (cfg.epochs == 0) throw ConfigError("transe: epochs must be positive");
    if (cfg.neg_samples == 0) throw ConfigError("transe: need at least one negative sample");
    if (!(cfg.lr > 0.0) || cfg.margin < 0.0) throw ConfigError("transe: lr must be > 0 and margin >= 0");
    if (facts.empty()) throw ConfigError("transe: no facts to train on");
    if (num_entities == 0) throw ConfigError("transe: no entities");
    for (const auto& t : facts) {
        if (t.head.index() >= num_entities || t.tail.index() >= num_entities ||
            t.relation.index() >= num_base_relations) {
            throw std::out_of_range("transe: fact references an unknown entity or relation");
        }
    }

    const std::size_t d = cfg.dim;
    Rng rng(cfg.seed);
    const double bound = 6.0 / std::sqrt(static_cast<double>(d));
    std::vector<double> ent(num_entities * d), rel(num_base_relations * d);
    for (auto& v : ent) v = rng.uniform(-bound, bound);
    for (auto& v : rel) v = rng.uniform(-bound, bound);
    normalize_rows(rel, d);
    normalize_rows(ent, d);

    std::vector<std::size_t> order(facts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> pos(d), neg(d);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
        double loss = 0.0;
        for (std::size_t idx : order) {
            const kg::Triple& t = facts[idx];
            for (std::size_t s = 0; s < cfg.neg_samples; ++s) {
                const kg::Triple c = corrupt(t, num_entities, rng);
                double* h = ent.data() + t.head.index() * d;
                double* r = rel.data() + t.relation.index() * d;
                double* tt = ent.data() + t.tail.index() * d;
                double* ch = ent.data() + c.head.index() * d;
                double* ct = ent.data() + c.tail.index() * d;
                const double dp = residual(h, r, tt, d, pos);
                const double dn = residual(ch, r, ct, d, neg);
                const double l = cfg.margin + dp - dn;
                if (l <= 0.0) continue;
                loss += l;
                const double ip = dp > 0.0 ? cfg.lr / dp : 0.0;
                const double in = dn > 0.0 ? cfg.lr / dn : 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    const double gp = ip * pos[j];
                    const double gn = in * neg[j];
                    h[j] -= gp;
                    r[j] -= gp;
                    tt[j] += gp;
                    ch[j] += gn;
                    r[j] += gn;
                    ct[j] -= gn;
                }
            }
        }
        normalize_rows(ent, d);
        if (report) report->epoch_loss.push_back(loss);
    }

    EmbeddingTable table;
    table.dim = d;
    table.num_entities = num_entities;
    table.num_relations = 2 * num_base_relations + 1;
    table.entities = std::move(ent);
    table.relations.assign(table.num_relations * d, 0.0);
    for (std::size_t r = 0; r < num_base_relations; ++r) {
        for (std::size_t j = 0; j < d; ++j) {
            table.relations[r * d + j] = rel[r * d + j];
            table.relations[(r + num_base_relations) * d + j] = -rel[r * d + j];
        }
    }
    nn::require_finite(table.entities, "transe entity vectors");
    nn::require_finite(table.relations, "transe relation vectors");
    return table;
}

double corruption_gap(const EmbeddingTable& table, std::span<const kg::Triple> triples, Rng& rng) {
    if (triples.empty()) throw std::invalid_argument("corruption_gap: no triples");
    double gap = 0.0;
    for (const auto& t : triples) {
        const kg::Triple c = corrupt(t, table.num_entities, rng);
        gap += transe_score(table, t.head, t.relation, t.tail) - transe_score(table, c.head, c.relation, c.tail);
    }
    return gap / static_cast<double>(triples.size());
}

}  // namespace duokg::embed
