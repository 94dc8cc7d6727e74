#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "duokg/kg.hpp"
#include "duokg/nn/tensor.hpp"

namespace duokg::embed {

/// Row-major entity and relation vectors.
///
/// Relation rows follow the graph layout: base relations, then inverses
/// (stored as the negated base vector), then the NO_OP row (zero).
struct EmbeddingTable {
    std::size_t dim = 0;
    std::size_t num_entities = 0;
    std::size_t num_relations = 0;
    std::vector<double> entities;
    std::vector<double> relations;

    std::span<const double> entity(EntityId e) const { return {entities.data() + e.index() * dim, dim}; }
    std::span<double> entity(EntityId e) { return {entities.data() + e.index() * dim, dim}; }
    std::span<const double> relation(RelationId r) const { return {relations.data() + r.index() * dim, dim}; }
    std::span<double> relation(RelationId r) { return {relations.data() + r.index() * dim, dim}; }
};

/// -||h + r - t||_2; higher is more plausible.
double transe_score(const EmbeddingTable& table, EntityId h, RelationId r, EntityId t);

struct TransEConfig {
    std::size_t dim = 50;
    double margin = 1.0;
    double lr = 0.01;
    std::size_t epochs = 1000;
    std::size_t neg_samples = 1;
    std::uint64_t seed = 1;
};

struct TransEReport {
    std::vector<double> epoch_loss;
};

/// Margin-ranking TransE with SGD over base-relation facts. Entity vectors are
/// projected to the unit sphere at init and after every epoch.
EmbeddingTable transe_train(std::span<const kg::Triple> facts, std::size_t num_entities,
                            std::size_t num_base_relations, const TransEConfig& config,
                            TransEReport* report = nullptr);

/// Mean true-triple score minus mean score of one random head/tail corruption
/// per triple. Positive means true triples score higher.
double corruption_gap(const EmbeddingTable& table, std::span<const kg::Triple> triples, Rng& rng);

struct KMeansConfig {
    std::size_t clusters = 75;
    std::size_t max_iters = 100;
    std::uint64_t seed = 1;
};

struct KMeansResult {
    std::vector<std::uint32_t> assignment;
    std::vector<double> centroids;        // clusters x dim
    std::vector<double> inertia_history;  // one entry per completed Lloyd iteration
    std::size_t iterations = 0;
    std::size_t reseeds = 0;
    bool converged = false;
};

/// k-means++ seeding followed by Lloyd iterations over n points of size dim.
KMeansResult kmeans(std::span<const double> points, std::size_t n, std::size_t dim, const KMeansConfig& config);

/// Nearest-centroid assignment (ties to the lower index); returns inertia.
/// OpenMP-parallel over points.
double assign_nearest(std::span<const double> points, std::size_t n, std::size_t dim,
                      std::span<const double> centroids, std::size_t k, std::vector<std::uint32_t>& assignment);
/// Serial version of assign_nearest kept as the reference.
double assign_nearest_reference(std::span<const double> points, std::size_t n, std::size_t dim,
                                std::span<const double> centroids, std::size_t k,
                                std::vector<std::uint32_t>& assignment);

/// Sum of squared distances to the assigned centroid.
double inertia(std::span<const double> points, std::size_t n, std::size_t dim, std::span<const double> centroids,
               std::span<const std::uint32_t> assignment);

/// Member means; empty clusters keep a zero row.
std::vector<double> cluster_means(std::span<const double> points, std::size_t n, std::size_t dim, std::size_t k,
                                  std::span<const std::uint32_t> assignment);

/// Cluster-level adjacency: B is listed under A iff some entity edge runs from
/// a member of A to a member of B. Every cluster also lists itself.
std::vector<std::vector<ClusterId>> build_cluster_graph(const kg::KnowledgeGraph& graph,
                                                        std::span<const std::uint32_t> assignment,
                                                        std::size_t num_clusters);

struct ClusterModel {
    std::size_t num_clusters = 0;
    std::size_t dim = 0;
    std::vector<std::uint32_t> assignment;
    std::vector<double> centroids;  // N x d
    std::vector<double> learned;    // N x d, initial values of the trainable half
    std::vector<std::vector<ClusterId>> adjacency;

    ClusterId cluster_of(EntityId e) const { return ClusterId(assignment.at(e.index())); }
    std::span<const double> centroid(ClusterId c) const { return {centroids.data() + c.index() * dim, dim}; }
    std::span<const double> learned_part(ClusterId c) const { return {learned.data() + c.index() * dim, dim}; }
    /// [centroid; learned_part], 2d.
    std::vector<double> embedding(ClusterId c) const;
    std::span<const ClusterId> neighbors(ClusterId c) const { return adjacency.at(c.index()); }
};

/// Clusters the entity vectors and maps the graph onto clusters. The learned
/// half starts as seeded uniform(-1/sqrt(d), 1/sqrt(d)).
ClusterModel make_cluster_model(const kg::KnowledgeGraph& graph, const EmbeddingTable& table,
                                const KMeansConfig& config);

/// Checkpoint content; any block may be absent.
struct Checkpoint {
    std::optional<EmbeddingTable> table;
    std::uint64_t seed = 0;
    std::optional<ClusterModel> clusters;  // adjacency is left empty; rebuild from the graph
    std::vector<std::pair<std::string, nn::Tensor>> params;
};

/// Blocks are an ASCII header line followed by little-endian float32 (or int32)
/// payloads. Values are rounded to float32.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Rounds every value to float32 so an in-memory model matches a reloaded one.
void round_to_float(std::vector<double>& values);

/// Copies parameters of a checkpoint into a store that already declares them;
/// names and shapes must match exactly.
void load_params(const Checkpoint& ckpt, nn::ParamStore& store);
std::vector<std::pair<std::string, nn::Tensor>> snapshot_params(const nn::ParamStore& store);

}  // namespace duokg::embed
