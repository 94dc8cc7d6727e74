#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "duokg/common.hpp"

namespace duokg::kg {

struct Triple {
    EntityId head;
    RelationId relation;
    EntityId tail;

    auto operator<=>(const Triple&) const = default;
};

/// Bidirectional name <-> dense index map. Indices follow first appearance.
class Vocabulary {
public:
    std::uint32_t intern(std::string_view name);
    std::optional<std::uint32_t> find(std::string_view name) const;
    const std::string& name(std::uint32_t index) const { return names_.at(index); }
    std::size_t size() const { return names_.size(); }
    bool empty() const { return names_.empty(); }
    const std::vector<std::string>& names() const { return names_; }

    /// "name<TAB>index" lines.
    void write(std::ostream& out) const;
    static Vocabulary read(std::istream& in);

    bool operator==(const Vocabulary& other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

struct TripleFile {
    std::vector<Triple> triples;
    Vocabulary entities;
    Vocabulary relations;
};

/// Reads "head<TAB>relation<TAB>tail" lines into fresh vocabularies.
TripleFile load_triples(const std::filesystem::path& path);

/// Same, interning names into existing vocabularies.
std::vector<Triple> load_triples(const std::filesystem::path& path, Vocabulary& entities,
                                 Vocabulary& relations);
std::vector<Triple> parse_triples(std::istream& in, Vocabulary& entities, Vocabulary& relations);

void write_triples(const std::filesystem::path& path, std::span<const Triple> triples,
                   const Vocabulary& entities, const Vocabulary& relations);

/// One outgoing edge (relation, destination).
struct Edge {
    RelationId relation;
    EntityId target;

    auto operator<=>(const Edge&) const = default;
};

struct GraphOptions {
    bool add_inverse = true;
    bool add_self_loop = true;
};

/// Directed multigraph used as the walking substrate.
///
/// Relation index layout: base relations [0, R), inverses [R, 2R), NO_OP = 2R.
/// The inverse and NO_OP ids exist regardless of the build flags so relation
/// embedding tables keep a fixed size.
class KnowledgeGraph {
public:
    static KnowledgeGraph build(std::span<const Triple> triples, const Vocabulary& entities,
                                const Vocabulary& relations, GraphOptions options = {});

    std::span<const Edge> action_space(EntityId entity) const;

    std::size_t num_entities() const { return adjacency_.size(); }
    std::size_t num_base_relations() const { return num_base_relations_; }
    std::size_t num_relations() const { return 2 * num_base_relations_ + 1; }
    RelationId no_op() const { return RelationId(static_cast<std::uint32_t>(2 * num_base_relations_)); }
    RelationId inverse_of(RelationId r) const;
    bool is_base(RelationId r) const { return r.index() < num_base_relations_; }
    bool is_inverse(RelationId r) const {
        return r.index() >= num_base_relations_ && r.index() < 2 * num_base_relations_;
    }

    std::size_t edge_count() const { return edge_count_; }
    std::size_t duplicates_removed() const { return duplicates_removed_; }

    const Vocabulary& entities() const { return entity_vocab_; }
    /// Base names plus "<name>^-1" inverses and "NO_OP".
    const Vocabulary& relations() const { return relation_vocab_; }

    /// Distinct destination entities of the outgoing edges, sorted.
    std::vector<EntityId> neighbors(EntityId entity) const;

private:
    std::vector<std::vector<Edge>> adjacency_;
    Vocabulary entity_vocab_;
    Vocabulary relation_vocab_;
    std::size_t num_base_relations_ = 0;
    std::size_t edge_count_ = 0;
    std::size_t duplicates_removed_ = 0;
};

/// Convenience wrapper matching build_graph(triples, add_inverse, add_self_loop).
KnowledgeGraph build_graph(std::span<const Triple> triples, const Vocabulary& entities,
                           const Vocabulary& relations, bool add_inverse, bool add_self_loop);

struct DegreeStats {
    double mean = 0.0;
    double median = 0.0;
};

/// Out-degree over base edges only; median is the lower median.
DegreeStats degree_stats(const KnowledgeGraph& graph);
/// Same, over an explicit edge source (e.g. train only or train+valid).
DegreeStats degree_stats(std::span<const Triple> edges, std::size_t num_entities);

struct QuerySample {
    EntityId source;
    RelationId query_relation;
    std::vector<EntityId> answers;  // sorted, unique
};

/// Groups triples by (head, relation) into queries with answer sets.
std::vector<QuerySample> group_queries(std::span<const Triple> triples);

/// All known tails for (head, relation), used by the filtered ranking protocol.
class AnswerIndex {
public:
    AnswerIndex() = default;
    explicit AnswerIndex(std::span<const std::span<const Triple>> sources);
    void add(std::span<const Triple> triples);
    bool contains(EntityId head, RelationId relation, EntityId tail) const;
    std::span<const EntityId> answers(EntityId head, RelationId relation) const;

private:
    static std::uint64_t key(EntityId h, RelationId r) {
        return (static_cast<std::uint64_t>(h.value) << 32) | r.value;
    }
    std::unordered_map<std::uint64_t, std::vector<EntityId>> map_;
};

/// A benchmark-style dataset directory.
struct Dataset {
    Vocabulary entities;
    Vocabulary relations;
    std::vector<Triple> train;
    std::vector<Triple> valid;
    std::vector<Triple> test;
    std::vector<Triple> facts;  // graph edge source

    /// Facts with every test triple removed.
    std::vector<Triple> graph_edges() const;
};

/// Loads facts.tsv (optional; defaults to train), train.tsv, valid.tsv (optional), test.tsv.
Dataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const std::filesystem::path& dir, const Dataset& dataset);

}  // namespace duokg::kg
