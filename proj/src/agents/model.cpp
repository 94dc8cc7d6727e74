#include <cmath>

#include "duokg/agents.hpp"

namespace duokg::agents {

namespace {

using nn::Shape;

void expect_shape(const nn::ParamStore& store, ParamId id, Shape want) {
    if (store.shape(id) != want) {
        throw ShapeError(store.name(id) + ": expected " + want.str() + ", found " + store.shape(id).str());
    }
}

ParamId bound(const nn::ParamStore& store, const std::string& name, Shape want) {
    if (!store.contains(name)) throw ShapeError("missing parameter " + name);
    const ParamId id = store.id(name);
    expect_shape(store, id, want);
    return id;
}

}  // namespace

PolicyModel PolicyModel::create(nn::ParamStore& store, const embed::EmbeddingTable& table,
                                const embed::ClusterModel& clusters) {
    const std::size_t d = table.dim;
    if (d == 0) throw ConfigError("policy model: embedding dimension must be positive");
    if (clusters.dim != d) throw ShapeError("policy model: cluster and embedding dimensions differ");
    PolicyModel m;
    m.shape = ModelShape{d, table.num_relations, clusters.num_clusters};

    m.giant.lstm = nn::LstmStack::create(store, "giant.lstm", 2 * d, 2 * d);
    m.giant.mix = store.add_uniform("giant.mix", Shape{2 * d, 4 * d});
    m.giant.w1 = store.add_uniform("giant.w1", Shape{4 * d, 4 * d});
    m.giant.w2 = store.add_uniform("giant.w2", Shape{4 * d, 4 * d});
    m.giant.cluster_learned =
        store.add_tensor("giant.cluster_learned", nn::Tensor(Shape{clusters.num_clusters, d}, clusters.learned));

    m.dwarf.lstm = nn::LstmStack::create(store, "dwarf.lstm", 2 * d, 2 * d);
    m.dwarf.mix = store.add_uniform("dwarf.mix", Shape{2 * d, 5 * d});
    m.dwarf.att_w = store.add_uniform("dwarf.att_w", Shape{d, d});
    m.dwarf.att_a = store.add_uniform("dwarf.att_a", Shape{2 * d, 1});
    m.dwarf.w1 = store.add_uniform("dwarf.w1", Shape{6 * d, 6 * d});
    m.dwarf.w2 = store.add_uniform("dwarf.w2", Shape{6 * d, 6 * d});
    m.dwarf.relations =
        store.add_tensor("dwarf.relations", nn::Tensor(Shape{table.num_relations, d}, table.relations));

    m.lambda.w1 = store.add_uniform("lambda.w1", Shape{2 * d, 4 * d});
    m.lambda.b1 = store.add("lambda.b1", Shape{2 * d, 1});
    m.lambda.w2 = store.add_uniform("lambda.w2", Shape{1, 2 * d});
    m.lambda.b2 = store.add("lambda.b2", Shape{1, 1});
    return m;
}

PolicyModel PolicyModel::bind(const nn::ParamStore& store, ModelShape shape) {
    const std::size_t d = shape.dim;
    PolicyModel m;
    m.shape = shape;
    m.giant.lstm = nn::LstmStack::bind(store, "giant.lstm", 2 * d, 2 * d);
    m.giant.mix = bound(store, "giant.mix", Shape{2 * d, 4 * d});
    m.giant.w1 = bound(store, "giant.w1", Shape{4 * d, 4 * d});
    m.giant.w2 = bound(store, "giant.w2", Shape{4 * d, 4 * d});
    m.giant.cluster_learned = bound(store, "giant.cluster_learned", Shape{shape.num_clusters, d});
    m.dwarf.lstm = nn::LstmStack::bind(store, "dwarf.lstm", 2 * d, 2 * d);
    m.dwarf.mix = bound(store, "dwarf.mix", Shape{2 * d, 5 * d});
    m.dwarf.att_w = bound(store, "dwarf.att_w", Shape{d, d});
    m.dwarf.att_a = bound(store, "dwarf.att_a", Shape{2 * d, 1});
    m.dwarf.w1 = bound(store, "dwarf.w1", Shape{6 * d, 6 * d});
    m.dwarf.w2 = bound(store, "dwarf.w2", Shape{6 * d, 6 * d});
    m.dwarf.relations = bound(store, "dwarf.relations", Shape{shape.num_relations, d});
    m.lambda.w1 = bound(store, "lambda.w1", Shape{2 * d, 4 * d});
    m.lambda.b1 = bound(store, "lambda.b1", Shape{2 * d, 1});
    m.lambda.w2 = bound(store, "lambda.w2", Shape{1, 2 * d});
    m.lambda.b2 = bound(store, "lambda.b2", Shape{1, 1});
    return m;
}

}  // namespace duokg::agents
