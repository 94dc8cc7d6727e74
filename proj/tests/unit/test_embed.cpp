#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace duokg;
using namespace duokg::embed;

namespace {

EmbeddingTable tiny_table(std::vector<double> ents, std::vector<double> rels, std::size_t dim) {
    EmbeddingTable t;
    t.dim = dim;
    t.num_entities = ents.size() / dim;
    t.num_relations = rels.size() / dim;
    t.entities = std::move(ents);
    t.relations = std::move(rels);
    return t;
}

std::vector<kg::Triple> chain(std::size_t n) {
    std::vector<kg::Triple> out;
    for (std::uint32_t i = 0; i + 1 < n; ++i) out.push_back({EntityId(i), RelationId(0), EntityId(i + 1)});
    return out;
}



}  // namespace

TEST_CASE("transe score examples") {
    const auto a = tiny_table({1, 0, 1, 1}, {0, 1}, 2);
    CHECK(transe_score(a, EntityId(0), RelationId(0), EntityId(1)) == 0.0);
    const auto b = tiny_table({0, 0, 3, 4}, {0, 0}, 2);
    CHECK(transe_score(b, EntityId(0), RelationId(0), EntityId(1)) == doctest::Approx(-5.0).epsilon(1e-15));
}

TEST_CASE("transe configuration errors") {
    const auto facts = chain(3);
    TransEConfig cfg;
    cfg.dim = 0;
    CHECK_THROWS_AS(transe_train(facts, 3, 1, cfg), ConfigError);
    cfg.dim = 4;
    cfg.epochs = 0;
    CHECK_THROWS_AS(transe_train(facts, 3, 1, cfg), ConfigError);
}

TEST_CASE("transe separates a two entity graph and is deterministic") {
    const std::vector<kg::Triple> facts{{EntityId(0), RelationId(0), EntityId(1)}};
    TransEConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 200;
    cfg.seed = 5;
    const auto t1 = transe_train(facts, 2, 1, cfg);
    const auto t2 = transe_train(facts, 2, 1, cfg);
    CHECK(t1.entities == t2.entities);
    CHECK(t1.relations == t2.relations);
    Rng rng(1);
    CHECK(corruption_gap(t1, facts, rng) > 0.0);
}

TEST_CASE("transe table layout and normalization") {
    Rng rng(2);
    const auto d = gen::dataset(rng, 25, 3, 60);
    TransEConfig cfg;
    cfg.dim = 6;
    cfg.epochs = 20;
    TransEReport report;
    const auto t = transe_train(d.facts, 25, 3, cfg, &report);
    CHECK(report.epoch_loss.size() == 20);
    CHECK(t.num_relations == 7);
    for (std::uint32_t r = 0; r < 3; ++r) {
        const auto base = t.relation(RelationId(r));
        const auto inv = t.relation(RelationId(r + 3));
        for (std::size_t k = 0; k < 6; ++k) CHECK(inv[k] == -base[k]);
    }
    for (double v : t.relation(RelationId(6))) CHECK(v == 0.0);
    for (std::uint32_t e = 0; e < 25; ++e) {
        const auto s = t.entity(EntityId(e));
        const std::vector<double> v(s.begin(), s.end());
        CHECK(std::sqrt(oracle_ref::dot(v, v)) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("transe generalizes along a chain") {
    // 26 entities linked by next/prev: 50 triples. Held-out next links are
    // implied by their prev counterparts.
    std::vector<kg::Triple> train, held;
    for (std::uint32_t i = 0; i + 1 < 26; ++i) {
        const kg::Triple next{EntityId(i), RelationId(0), EntityId(i + 1)};
        (i % 5 == 2 ? held : train).push_back(next);
        train.push_back({EntityId(i + 1), RelationId(1), EntityId(i)});
    }
    CHECK(train.size() + held.size() == 50);
    TransEConfig cfg;
    cfg.dim = 16;
    cfg.epochs = 500;
    cfg.margin = 1.0;
    const auto t = transe_train(train, 26, 2, cfg);
    Rng rng(9);
    CHECK(corruption_gap(t, held, rng) > cfg.margin / 2);
}

TEST_CASE("kmeans with one cluster per point") {
    Rng rng(4);
    const std::size_t n = 7, dim = 3;
    const auto pts = gen::vector(rng, n * dim);
    KMeansConfig cfg;
    cfg.clusters = n;
    const auto r = kmeans(pts, n, dim, cfg);
    CHECK(std::set<std::uint32_t>(r.assignment.begin(), r.assignment.end()).size() == n);
    CHECK(inertia(pts, n, dim, r.centroids, r.assignment) == doctest::Approx(0.0));
    cfg.clusters = n + 1;
    CHECK_THROWS_AS(kmeans(pts, n, dim, cfg), ConfigError);
}

TEST_CASE("kmeans matches the best two-partition on separated blobs") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const std::size_t n = 10;
        std::vector<double> pts;
        std::vector<int> blob;
        for (std::size_t i = 0; i < n; ++i) {
            const int b = i < 4 ? 0 : 1;
            pts.push_back((b ? 10.0 : -10.0) + rng.normal());
            pts.push_back(rng.normal());
            blob.push_back(b);
        }
        // brute force over all 2-partitions
        double best = 1e300;
        std::uint32_t best_mask = 0;
        for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
            std::vector<std::uint32_t> a(n);
            for (std::size_t i = 0; i < n; ++i) a[i] = (mask >> i) & 1u;
            const auto c = cluster_means(pts, n, 2, 2, a);
            const double in = inertia(pts, n, 2, c, a);
            if (in < best) best = in, best_mask = mask;
        }
        KMeansConfig cfg;
        cfg.clusters = 2;
        cfg.seed = seed;
        const auto r = kmeans(pts, n, 2, cfg);
        CAPTURE(seed);
        for (std::size_t i = 0; i < n; ++i) {
            const bool same_as_first = r.assignment[i] == r.assignment[0];
            CHECK(same_as_first == (((best_mask >> i) & 1u) == (best_mask & 1u)));
            CHECK(same_as_first == (blob[i] == blob[0]));
        }
        CHECK(inertia(pts, n, 2, r.centroids, r.assignment) == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("kmeans inertia is non-increasing and centroids are member means") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const std::size_t n = 30 + rng.below(50), dim = 1 + rng.below(5), k = 1 + rng.below(8);
        const auto pts = gen::vector(rng, n * dim);
        KMeansConfig cfg;
        cfg.clusters = k;
        cfg.seed = seed;
        const auto r = kmeans(pts, n, dim, cfg);
        for (std::size_t i = 1; i < r.inertia_history.size(); ++i)
            CHECK(r.inertia_history[i] <= r.inertia_history[i - 1] + 1e-12);
        if (r.converged) {
            const auto means = cluster_means(pts, n, dim, k, r.assignment);
            for (std::size_t i = 0; i < means.size(); ++i) CHECK(std::abs(means[i] - r.centroids[i]) < 1e-9);
        }
        std::vector<std::uint32_t> par, ser;
        const double ip = assign_nearest(pts, n, dim, r.centroids, k, par);
        const double is = assign_nearest_reference(pts, n, dim, r.centroids, k, ser);
        CHECK(par == ser);
        CHECK(ip == doctest::Approx(is).epsilon(1e-12));
    }
}

TEST_CASE("cluster graph examples") {
    Rng rng(6);
    const auto d = gen::dataset(rng, 12, 2, 20);
    const auto g = kg::KnowledgeGraph::build(d.facts, d.entities, d.relations);
    SUBCASE("one cluster") {
        const auto adj = build_cluster_graph(g, std::vector<std::uint32_t>(12, 0), 1);
        REQUIRE(adj.size() == 1);
        CHECK(adj[0] == std::vector<ClusterId>{ClusterId(0)});
    }
    SUBCASE("no crossing edges") {
        kg::Vocabulary e, r;
        for (int i = 0; i < 3; ++i) e.intern("n" + std::to_string(i));
        r.intern("r");
        const auto iso = kg::KnowledgeGraph::build({}, e, r);
        const auto adj = build_cluster_graph(iso, std::vector<std::uint32_t>{0, 1, 2}, 3);
        for (std::uint32_t c = 0; c < 3; ++c) CHECK(adj[c] == std::vector<ClusterId>{ClusterId(c)});
    }
    SUBCASE("crossing edge lifts both ways through the inverse") {
        kg::Vocabulary e, r;
        e.intern("a");
        e.intern("b");
        r.intern("r");
        const std::vector<kg::Triple> one{{EntityId(0), RelationId(0), EntityId(1)}};
        const auto two = kg::KnowledgeGraph::build(one, e, r);
        const auto adj = build_cluster_graph(two, std::vector<std::uint32_t>{0, 1}, 2);
        CHECK(adj[0] == std::vector<ClusterId>{ClusterId(0), ClusterId(1)});
        CHECK(adj[1] == std::vector<ClusterId>{ClusterId(0), ClusterId(1)});
    }
}

TEST_CASE("cluster graph is the image of the entity edges") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        Rng rng(seed);
        const std::size_t n = 5 + rng.below(40), k = 1 + rng.below(6);
        const auto d = gen::dataset(rng, n, 1 + rng.below(4), rng.below(80));
        const auto g = kg::KnowledgeGraph::build(d.facts, d.entities, d.relations);
        std::vector<std::uint32_t> a(n);
        for (auto& x : a) x = static_cast<std::uint32_t>(rng.below(k));
        std::set<std::pair<std::uint32_t, std::uint32_t>> expected;
        for (std::uint32_t c = 0; c < k; ++c) expected.insert({c, c});
        for (std::uint32_t e = 0; e < n; ++e)
            for (const auto& edge : g.action_space(EntityId(e))) expected.insert({a[e], a[edge.target.index()]});
        const auto adj = build_cluster_graph(g, a, k);
        std::set<std::pair<std::uint32_t, std::uint32_t>> got;
        for (std::uint32_t c = 0; c < k; ++c) {
            CHECK(std::is_sorted(adj[c].begin(), adj[c].end()));
            for (auto b : adj[c]) got.insert({c, b.value});
        }
        CHECK(got == expected);
    }
}

TEST_CASE("cluster model embedding and centroids") {
    Rng rng(8);
    const auto w = gen::world(rng, 40, 3, 90, 5, 4);
    KMeansConfig cfg;
    cfg.clusters = 4;
    const auto model = make_cluster_model(w.graph, w.table, cfg);
    CHECK(model.assignment.size() == 40);
    const auto means = cluster_means(w.table.entities, 40, 5, 4, model.assignment);
    for (std::size_t i = 0; i < means.size(); ++i) CHECK(std::abs(means[i] - model.centroids[i]) < 1e-9);
    for (std::uint32_t c = 0; c < 4; ++c) {
        const auto emb = model.embedding(ClusterId(c));
        REQUIRE(emb.size() == 10);
        for (std::size_t k = 0; k < 5; ++k) CHECK(emb[k] == model.centroid(ClusterId(c))[k]);
    }
}

TEST_CASE("checkpoint round trip") {
    Rng rng(10);
    const auto w = gen::world(rng, 20, 2, 40, 4, 3);
    Checkpoint ck;
    ck.table = w.table;
    ck.seed = 77;
    ck.clusters = w.clusters;
    nn::ParamStore store(3);
    store.add_uniform("x.w", {3, 4});
    store.add_uniform("x.b", {3, 1});
    ck.params = snapshot_params(store);
    const auto path = std::filesystem::temp_directory_path() / "duokg_test_ckpt.bin";
    save_checkpoint(path, ck);
    const auto back = load_checkpoint(path);

    auto rounded = w.table.entities;
    round_to_float(rounded);
    REQUIRE(back.table);
    CHECK(back.table->entities == rounded);
    CHECK(back.seed == 77);
    REQUIRE(back.clusters);
    CHECK(back.clusters->assignment == w.clusters.assignment);

    nn::ParamStore other(99);
    other.add("x.w", {3, 4});
    other.add("x.b", {3, 1});
    load_params(back, other);
    for (std::uint32_t p = 0; p < 2; ++p) {
        auto v = std::vector<double>(store.values({p}).begin(), store.values({p}).end());
        round_to_float(v);
        CHECK(std::vector<double>(other.values({p}).begin(), other.values({p}).end()) == v);
    }

    nn::ParamStore wrong;
    wrong.add("x.w", {4, 3});
    wrong.add("x.b", {3, 1});
    CHECK_THROWS_AS(load_params(back, wrong), ShapeError);
    CHECK_THROWS_AS(load_checkpoint("/nonexistent/ckpt"), IoError);
}
