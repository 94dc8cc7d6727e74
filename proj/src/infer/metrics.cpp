#include <algorithm>
#include <cmath>
#include <limits>

#include "duokg/infer.hpp"
#include "duokg/log.hpp"

namespace duokg::infer {

RankMetrics mrr_hits(std::span<const std::vector<std::size_t>> gold_ranks, std::span<const std::size_t> ks) {
    if (gold_ranks.empty()) throw std::invalid_argument("mrr_hits: no queries");
    RankMetrics m;
    for (std::size_t k : ks) m.hits[k] = 0.0;
    for (const auto& ranks : gold_ranks) {
        if (ranks.empty()) throw std::invalid_argument("mrr_hits: query without a gold answer");
        const std::size_t best = *std::min_element(ranks.begin(), ranks.end());
        if (best == 0) throw std::invalid_argument("mrr_hits: ranks start at 1");
        m.mrr += 1.0 / static_cast<double>(best);
        for (std::size_t k : ks)
            if (best <= k) m.hits[k] += 1.0;
    }
    const double n = static_cast<double>(gold_ranks.size());
    m.mrr /= n;
    for (auto& [k, v] : m.hits) v /= n;
    return m;
}

double average_precision(const std::vector<bool>& ranked_labels) {
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranked_labels.size(); ++i) {
        if (!ranked_labels[i]) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
    if (hits == 0) return std::numeric_limits<double>::quiet_NaN();
    return sum / static_cast<double>(hits);
}

double map_score(std::span<const std::vector<bool>> ranked_labels) {
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t q = 0; q < ranked_labels.size(); ++q) {
        const double ap = average_precision(ranked_labels[q]);
        if (std::isnan(ap)) {
            log::warn("map_score: query " + std::to_string(q) + " has no positives; skipped");
            continue;
        }
        sum += ap;
        ++used;
    }
    if (used == 0) throw std::invalid_argument("map_score: no query has a positive");
    return sum / static_cast<double>(used);
}

SimilarityScores css_ess(std::span<const env::DualRollout> rollouts, const embed::EmbeddingTable& table) {
    SimilarityScores s;
    if (rollouts.empty()) return s;
    for (const auto& r : rollouts) {
        s.css += r.phi_end;
        s.ess += env::entity_similarity(table, r.final_entity, r.answers);
    }
    s.css /= static_cast<double>(rollouts.size());
    s.ess /= static_cast<double>(rollouts.size());
    return s;
}

}  // namespace duokg::infer
