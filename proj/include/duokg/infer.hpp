#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "duokg/agents.hpp"
#include "duokg/env.hpp"

namespace duokg::infer {

struct BeamConfig {
    std::size_t width = 50;
    std::size_t path_length = 3;
};

struct RankedEntity {
    EntityId entity;
    double score = 0.0;  // best path log-probability
};

/// Beam search over DWARF log-probabilities with GIANT advancing greedily in
/// every hypothesis. Returns entities by descending score, ties by index.
std::vector<RankedEntity> beam_search(const agents::Policy& policy, EntityId source, RelationId query,
                                      const BeamConfig& config);

/// Pools path scores per end entity (max) and sorts like beam_search.
std::vector<RankedEntity> rank_endpoints(std::span<const std::pair<EntityId, double>> paths);

/// 1-based rank of `gold`; `missing_rank` when it was not reached. The filtered
/// rank skips entities in `filter` other than the gold itself.
std::size_t rank_of(std::span<const RankedEntity> ranking, EntityId gold, std::size_t missing_rank);
std::size_t filtered_rank_of(std::span<const RankedEntity> ranking, EntityId gold, std::span<const EntityId> filter,
                             std::size_t missing_rank);

struct RankMetrics {
    double mrr = 0.0;
    std::map<std::size_t, double> hits;
};

/// Per query the best-ranked gold counts. Empty input is an error.
RankMetrics mrr_hits(std::span<const std::vector<std::size_t>> gold_ranks, std::span<const std::size_t> ks);

/// Average precision of one ranked list of relevance labels; NaN without positives.
double average_precision(const std::vector<bool>& ranked_labels);
/// Mean AP over the queries of one task; queries without positives are skipped.
double map_score(std::span<const std::vector<bool>> ranked_labels);

struct SimilarityScores {
    double css = 0.0;
    double ess = 0.0;
};
/// Mean terminal cluster/entity similarity to the targets over rollouts.
SimilarityScores css_ess(std::span<const env::DualRollout> rollouts, const embed::EmbeddingTable& table);

struct RankResult {
    std::size_t query_id = 0;
    EntityId source;
    RelationId relation;
    EntityId gold;
    std::size_t rank_raw = 0;
    std::size_t rank_filtered = 0;
    double score = 0.0;  // gold score, -inf when not reached
};

struct EvalSummary {
    RankMetrics raw;
    RankMetrics filtered;
    std::size_t queries = 0;
};

/// Ranks every test triple's tail. Parallel over triples.
std::vector<RankResult> evaluate(const agents::Policy& policy, std::span<const kg::Triple> triples,
                                 const kg::AnswerIndex& known, const BeamConfig& config, std::size_t workers);
/// Serial version kept as the reference.
std::vector<RankResult> evaluate_reference(const agents::Policy& policy, std::span<const kg::Triple> triples,
                                           const kg::AnswerIndex& known, const BeamConfig& config);

EvalSummary summarize(std::span<const RankResult> results);

/// query_id,source,relation,gold,rank_raw,rank_filtered,score then a summary block.
void write_results_csv(std::ostream& out, std::span<const RankResult> results, const EvalSummary& summary,
                       const kg::KnowledgeGraph& graph);

}  // namespace duokg::infer
