#include <algorithm>
#include <numeric>

#include "duokg/kg.hpp"
#include "duokg/log.hpp"

namespace duokg::kg {

KnowledgeGraph KnowledgeGraph::build(std::span<const Triple> triples, const Vocabulary& entities,
                                     const Vocabulary& relations, GraphOptions options) {
    KnowledgeGraph g;
    g.entity_vocab_ = entities;
    g.num_base_relations_ = relations.size();
    g.relation_vocab_ = relations;
    for (const auto& name : relations.names()) {
        const std::string inv = name + "^-1";
        if (relations.find(inv)) throw ConfigError("relation name collides with inverse name: " + inv);
        g.relation_vocab_.intern(inv);
    }
    if (relations.find("NO_OP")) throw ConfigError("relation name NO_OP is reserved");
    g.relation_vocab_.intern("NO_OP");

    const std::size_t n = entities.size();
    const std::size_t nr = relations.size();
    g.adjacency_.assign(n, {});
    std::vector<Triple> unique(triples.begin(), triples.end());
    for (const auto& t : unique) {
        if (t.head.index() >= n || t.tail.index() >= n || t.relation.index() >= nr) {
            throw std::out_of_range("triple references an index outside the vocabularies");
        }
    }
    std::sort(unique.begin(), unique.end());
    const auto last = std::unique(unique.begin(), unique.end());
    g.duplicates_removed_ = static_cast<std::size_t>(std::distance(last, unique.end()));
    unique.erase(last, unique.end());
    if (g.duplicates_removed_ > 0) {
        log::info("build_graph: removed " + std::to_string(g.duplicates_removed_) + " duplicate triples");
    }

    for (const auto& t : unique) {
        g.adjacency_[t.head.index()].push_back(Edge{t.relation, t.tail});
        if (options.add_inverse) {
            g.adjacency_[t.tail.index()].push_back(
                Edge{RelationId(static_cast<std::uint32_t>(t.relation.index() + nr)), t.head});
        }
    }
    for (std::size_t e = 0; e < n; ++e) {
        auto& edges = g.adjacency_[e];
        if (options.add_self_loop) edges.push_back(Edge{g.no_op(), EntityId(static_cast<std::uint32_t>(e))});
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        g.edge_count_ += edges.size();
    }
    return g;
}

KnowledgeGraph build_graph(std::span<const Triple> triples, const Vocabulary& entities,
                           const Vocabulary& relations, bool add_inverse, bool add_self_loop) {
    return KnowledgeGraph::build(triples, entities, relations, GraphOptions{add_inverse, add_self_loop});
}

std::span<const Edge> KnowledgeGraph::action_space(EntityId entity) const {
    return adjacency_.at(entity.index());
}

RelationId KnowledgeGraph::inverse_of(RelationId r) const {
    if (is_base(r)) return RelationId(static_cast<std::uint32_t>(r.index() + num_base_relations_));
    if (is_inverse(r)) return RelationId(static_cast<std::uint32_t>(r.index() - num_base_relations_));
    return r;
}

std::vector<EntityId> KnowledgeGraph::neighbors(EntityId entity) const {
    std::vector<EntityId> out;
    for (const auto& edge : action_space(entity)) out.push_back(edge.target);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

DegreeStats stats_from_degrees(std::vector<std::size_t> degrees) {
    if (degrees.empty()) throw std::invalid_argument("degree_stats: graph has no entities");
    const double total = static_cast<double>(std::accumulate(degrees.begin(), degrees.end(), std::size_t{0}));
    std::sort(degrees.begin(), degrees.end());
    DegreeStats s;
    s.mean = total / static_cast<double>(degrees.size());
    s.median = static_cast<double>(degrees[(degrees.size() - 1) / 2]);
    return s;
}

}  // namespace

DegreeStats degree_stats(const KnowledgeGraph& graph) {
    std::vector<std::size_t> degrees(graph.num_entities(), 0);
    for (std::size_t e = 0; e < graph.num_entities(); ++e) {
        for (const auto& edge : graph.action_space(EntityId(static_cast<std::uint32_t>(e)))) {
            if (graph.is_base(edge.relation)) ++degrees[e];
        }
    }
    return stats_from_degrees(std::move(degrees));
}

DegreeStats degree_stats(std::span<const Triple> edges, std::size_t num_entities) {
    std::vector<std::size_t> degrees(num_entities, 0);
    for (const auto& t : edges) ++degrees.at(t.head.index());
    return stats_from_degrees(std::move(degrees));
}

std::vector<QuerySample> group_queries(std::span<const Triple> triples) {
    std::vector<Triple> sorted(triples.begin(), triples.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const Triple& a, const Triple& b) {
        return std::tie(a.head, a.relation) < std::tie(b.head, b.relation);
    });
    std::vector<QuerySample> out;
    for (const auto& t : sorted) {
        if (out.empty() || out.back().source != t.head || out.back().query_relation != t.relation) {
            out.push_back(QuerySample{t.head, t.relation, {}});
        }
        auto& answers = out.back().answers;
        if (answers.empty() || answers.back() != t.tail) answers.push_back(t.tail);
    }
    for (auto& q : out) {
        std::sort(q.answers.begin(), q.answers.end());
        q.answers.erase(std::unique(q.answers.begin(), q.answers.end()), q.answers.end());
    }
    return out;
}

AnswerIndex::AnswerIndex(std::span<const std::span<const Triple>> sources) {
    for (auto s : sources) add(s);
}

void AnswerIndex::add(std::span<const Triple> triples) {
    for (const auto& t : triples) {
        auto& v = map_[key(t.head, t.relation)];
        auto it = std::lower_bound(v.begin(), v.end(), t.tail);
        if (it == v.end() || *it != t.tail) v.insert(it, t.tail);
    }
}

bool AnswerIndex::contains(EntityId head, RelationId relation, EntityId tail) const {
    auto a = answers(head, relation);
    return std::binary_search(a.begin(), a.end(), tail);
}

std::span<const EntityId> AnswerIndex::answers(EntityId head, RelationId relation) const {
    if (auto it = map_.find(key(head, relation)); it != map_.end()) return it->second;
    return {};
}

}  // namespace duokg::kg
