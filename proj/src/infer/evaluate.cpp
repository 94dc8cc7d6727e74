#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "duokg/infer.hpp"

namespace duokg::infer {

namespace {

RankResult rank_triple(const agents::Policy& policy, const kg::Triple& tr, std::size_t id,
                       const kg::AnswerIndex& known, const BeamConfig& config) {
    const auto ranking = beam_search(policy, tr.head, tr.relation, config);
    RankResult r;
    r.query_id = id;
    r.source = tr.head;
    r.relation = tr.relation;
    r.gold = tr.tail;
    const std::size_t missing = config.width + 1;
    r.rank_raw = rank_of(ranking, tr.tail, missing);
    r.rank_filtered = filtered_rank_of(ranking, tr.tail, known.answers(tr.head, tr.relation), missing);
    r.score = -std::numeric_limits<double>::infinity();
    for (const auto& e : ranking)
        if (e.entity == tr.tail) r.score = e.score;
    return r;
}

}  // namespace

std::vector<RankResult> evaluate(const agents::Policy& policy, std::span<const kg::Triple> triples,
                                 const kg::AnswerIndex& known, const BeamConfig& config, std::size_t workers) {
    std::vector<RankResult> out(triples.size());
    const auto n = static_cast<std::int64_t>(triples.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(static_cast<int>(std::max<std::size_t>(workers, 1)))
    for (std::int64_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        out[u] = rank_triple(policy, triples[u], u, known, config);
    }
    return out;
}

std::vector<RankResult> evaluate_reference(const agents::Policy& policy, std::span<const kg::Triple> triples,
                                           const kg::AnswerIndex& known, const BeamConfig& config) {
    std::vector<RankResult> out;
    for (std::size_t i = 0; i < triples.size(); ++i) out.push_back(rank_triple(policy, triples[i], i, known, config));
    return out;
}

EvalSummary summarize(std::span<const RankResult> results) {
    std::vector<std::vector<std::size_t>> raw, filtered;
    for (const auto& r : results) {
        raw.push_back({r.rank_raw});
        filtered.push_back({r.rank_filtered});
    }
    const std::size_t ks[] = {1, 3, 10};
    EvalSummary s;
    s.raw = mrr_hits(raw, ks);
    s.filtered = mrr_hits(filtered, ks);
    s.queries = results.size();
    return s;
}

void write_results_csv(std::ostream& out, std::span<const RankResult> results, const EvalSummary& summary,
                       const kg::KnowledgeGraph& graph) {
    out << std::setprecision(17);
    out << "query_id,source,relation,gold,rank_raw,rank_filtered,score\n";
    for (const auto& r : results) {
        out << r.query_id << ',' << graph.entities().name(r.source.value) << ','
            << graph.relations().name(r.relation.value) << ',' << graph.entities().name(r.gold.value) << ','
            << r.rank_raw << ',' << r.rank_filtered << ',';
        if (std::isinf(r.score)) {
            out << "-inf";
        } else {
            out << r.score;
        }
        out << '\n';
    }
    out << "# summary queries=" << summary.queries << '\n';
    for (const auto& [label, m] : {std::pair{"raw", &summary.raw}, std::pair{"filtered", &summary.filtered}}) {
        out << "# " << label << " MRR=" << m->mrr << " Hits@1=" << m->hits.at(1) << " Hits@3=" << m->hits.at(3)
            << " Hits@10=" << m->hits.at(10) << '\n';
    }
}

}  // namespace duokg::infer
