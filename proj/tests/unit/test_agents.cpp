#include <doctest.h>

#include <cmath>
#include <numeric>

#include "support/generators.hpp"
#include "support/objectives.hpp"
#include "support/oracles.hpp"

using namespace duokg;
using namespace duokg::agents;

namespace {

std::vector<double> vals(const Tape& t, Var v) {
    const auto s = t.value(v);
    return {s.begin(), s.end()};
}

std::vector<double> probs(const Tape& t, Var log_probs) {
    auto v = vals(t, log_probs);
    for (auto& x : v) x = std::exp(x);
    return v;
}

std::vector<double> param(const nn::ParamStore& s, ParamId id) {
    return {s.values(id).begin(), s.values(id).end()};
}

struct Fixture {
    gen::World world;
    nn::ParamStore store;
    PolicyModel model;

    Fixture(std::uint64_t seed, std::size_t dim, std::size_t entities = 15, std::size_t clusters = 3)
        : store(seed) {
        Rng rng(seed);
        world = gen::world(rng, entities, 3, 2 * entities, dim, clusters);
        model = PolicyModel::create(store, world.table, world.clusters);
    }
    std::size_t d() const { return model.shape.dim; }
};

}  // namespace

TEST_CASE("parameter shapes") {
    Fixture f(1, 4);
    const std::size_t d = 4;
    const auto& s = f.store;
    CHECK(s.shape(f.model.giant.mix) == nn::Shape{2 * d, 4 * d});
    CHECK(s.shape(f.model.dwarf.mix) == nn::Shape{2 * d, 5 * d});
    CHECK(s.shape(f.model.giant.w1) == nn::Shape{4 * d, 4 * d});
    CHECK(s.shape(f.model.giant.w2) == nn::Shape{4 * d, 4 * d});
    CHECK(s.shape(f.model.dwarf.w1) == nn::Shape{6 * d, 6 * d});
    CHECK(s.shape(f.model.dwarf.w2) == nn::Shape{6 * d, 6 * d});
    CHECK(s.shape(f.model.lambda.w1) == nn::Shape{2 * d, 4 * d});
    CHECK(s.shape(f.model.lambda.w2) == nn::Shape{1, 2 * d});
    CHECK(f.model.giant.lstm.layers.size() == 3);
    CHECK(f.model.giant.lstm.hidden_size == 2 * d);
    CHECK(f.model.dwarf.lstm.input_size == 2 * d);
    for (std::uint32_t i = 0; i < s.count(); ++i) {
        const auto& name = s.name({i});
        const bool ok = name.rfind("giant.", 0) == 0 || name.rfind("dwarf.", 0) == 0 || name.rfind("lambda.", 0) == 0;
        CHECK(ok);
    }
    CHECK_NOTHROW(PolicyModel::bind(s, f.model.shape));
    auto wrong = f.model.shape;
    wrong.dim = 5;
    CHECK_THROWS_AS(PolicyModel::bind(s, wrong), ShapeError);
}

TEST_CASE("giant head degenerate candidate sets") {
    Fixture f(2, 3);
    Tape t(&f.store, false);
    Rng rng(3);
    const auto emb = t.constant(gen::vector(rng, 6));
    const auto h = t.constant(gen::vector(rng, 6));
    const auto one = probs(t, giant_head(t, f.model, emb, h, t.constant(nn::Shape{1, 6}, gen::vector(rng, 6))));
    CHECK(one == std::vector<double>{1.0});
    auto row = gen::vector(rng, 6);
    auto two_rows = row;
    two_rows.insert(two_rows.end(), row.begin(), row.end());
    const auto two = probs(t, giant_head(t, f.model, emb, h, t.constant(nn::Shape{2, 6}, two_rows)));
    CHECK(two[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(two[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(giant_head(t, f.model, emb, h, t.constant(nn::Shape{1, 5}, gen::vector(rng, 5))), ShapeError);
}

TEST_CASE("giant head matches direct computation at d=1") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Fixture f(seed, 1);
        Rng rng(seed + 100);
        const auto c = gen::vector(rng, 2), h = gen::vector(rng, 2), cand = gen::vector(rng, 3 * 2);
        Tape t(&f.store, false);
        const auto got = probs(t, giant_head(t, f.model, t.constant(c), t.constant(h),
                                              t.constant(nn::Shape{3, 2}, cand)));
        std::vector<double> x{c[0], c[1], h[0], h[1]};
        auto hidden = oracle_ref::matvec(param(f.store, f.model.giant.w1), 4, 4, x);
        for (auto& v : hidden) v = std::max(0.0, v);
        const auto s = oracle_ref::matvec(param(f.store, f.model.giant.w2), 4, 4, hidden);
        std::vector<double> logits;
        for (int k = 0; k < 3; ++k) {
            const double a = cand[2 * k], b = cand[2 * k + 1];
            logits.push_back(a * s[0] + b * s[1] + a * s[2] + b * s[3]);
        }
        const auto want = oracle_ref::softmax(logits);
        for (int k = 0; k < 3; ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-13));
    }
}

TEST_CASE("dwarf head matches direct computation at d=1") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Fixture f(seed, 1);
        Rng rng(seed + 200);
        const auto x4 = gen::vector(rng, 4), h = gen::vector(rng, 2), cand = gen::vector(rng, 4 * 2);
        Tape t(&f.store, false);
        DwarfInputs in{t.constant(std::vector<double>{x4[0]}), t.constant(std::vector<double>{x4[1]}),
                       t.constant(std::vector<double>{x4[2]}), t.constant(std::vector<double>{x4[3]})};
        const auto got = probs(t, dwarf_head(t, f.model, in, t.constant(h), t.constant(nn::Shape{4, 2}, cand)));
        std::vector<double> x{x4[0], x4[1], x4[2], x4[3], h[0], h[1]};
        auto hidden = oracle_ref::matvec(param(f.store, f.model.dwarf.w1), 6, 6, x);
        for (auto& v : hidden) v = std::max(0.0, v);
        const auto s = oracle_ref::matvec(param(f.store, f.model.dwarf.w2), 6, 6, hidden);
        std::vector<double> logits;
        for (int k = 0; k < 4; ++k) {
            const double r = cand[2 * k], e = cand[2 * k + 1];
            logits.push_back(r * (s[0] + s[2] + s[4]) + e * (s[1] + s[3] + s[5]));
        }
        const auto want = oracle_ref::softmax(logits);
        for (int k = 0; k < 4; ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-13));
    }
}

TEST_CASE("dwarf head degenerate candidate sets") {
    Fixture f(4, 2);
    Tape t(&f.store, false);
    Rng rng(5);
    auto c = [&] { return t.constant(gen::vector(rng, 2)); };
    DwarfInputs in{c(), c(), c(), c()};
    const auto h = t.constant(gen::vector(rng, 4));
    CHECK(probs(t, dwarf_head(t, f.model, in, h, t.constant(nn::Shape{1, 4}, gen::vector(rng, 4)))) ==
          std::vector<double>{1.0});
    const auto row = gen::vector(rng, 4);
    std::vector<double> rows;
    for (int k = 0; k < 3; ++k) rows.insert(rows.end(), row.begin(), row.end());
    for (double p : probs(t, dwarf_head(t, f.model, in, h, t.constant(nn::Shape{3, 4}, rows))))
        CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("distributions are normalized and permutation equivariant") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Fixture f(seed, 2);
        Rng rng(seed + 300);
        const std::size_t k = 1 + rng.below(8);
        const auto rows = gen::vector(rng, k * 4, 2.0);
        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = k; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
        std::vector<double> permuted;
        for (auto p : perm) permuted.insert(permuted.end(), rows.begin() + 4 * p, rows.begin() + 4 * p + 4);

        Tape t(&f.store, false);
        const auto emb = t.constant(gen::vector(rng, 4)), h = t.constant(gen::vector(rng, 4));
        auto c = [&] { return t.constant(gen::vector(rng, 2)); };
        DwarfInputs in{c(), c(), c(), c()};
        for (int head = 0; head < 2; ++head) {
            auto run = [&](const std::vector<double>& r) {
                const auto cand = t.constant(nn::Shape{k, 4}, r);
                return probs(t, head == 0 ? giant_head(t, f.model, emb, h, cand) : dwarf_head(t, f.model, in, h, cand));
            };
            const auto p = run(rows), q = run(permuted);
            REQUIRE(p.size() == k);
            CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) < 1e-12);
            for (std::size_t i = 0; i < k; ++i) {
                CHECK(p[i] >= 0.0);
                CHECK(std::abs(q[i] - p[perm[i]]) < 1e-14);
            }
        }
    }
}

TEST_CASE("attention examples") {
    SUBCASE("isolated entity attends to itself") {
        kg::Vocabulary e, r;
        e.intern("a");
        e.intern("b");
        r.intern("r");
        const auto g = kg::KnowledgeGraph::build({}, e, r);
        Rng rng(6);
        const auto table = gen::table(rng, 2, 1, 3);
        const auto clusters = gen::clusters(rng, g, table, 1);
        nn::ParamStore store(6);
        const auto m = PolicyModel::create(store, table, clusters);
        Tape t(&store, false);
        const auto atn = vals(t, dwarf_attention(t, m, Frozen{&g, &table, &clusters}, EntityId(1)));
        const auto ent = table.entity(EntityId(1));
        const auto want = oracle_ref::matvec(param(store, m.dwarf.att_w), 3, 3, {ent.begin(), ent.end()});
        for (int i = 0; i < 3; ++i) CHECK(atn[i] == doctest::Approx(want[i]).epsilon(1e-14));
    }
    SUBCASE("shared neighbour embedding") {
        Fixture f(7, 3);
        auto table = f.world.table;
        const auto v = std::vector<double>{0.3, -0.2, 0.9};
        for (std::uint32_t e = 0; e < table.num_entities; ++e) std::copy(v.begin(), v.end(), table.entity(EntityId(e)).begin());
        Tape t(&f.store, false);
        const auto want = oracle_ref::matvec(param(f.store, f.model.dwarf.att_w), 3, 3, v);
        for (std::uint32_t e = 0; e < table.num_entities; ++e) {
            const auto atn = vals(t, dwarf_attention(t, f.model, Frozen{&f.world.graph, &table, &f.world.clusters}, EntityId(e)));
            for (int i = 0; i < 3; ++i) CHECK(atn[i] == doctest::Approx(want[i]).epsilon(1e-13));
        }
    }
    SUBCASE("two neighbours at d=1") {
        kg::Vocabulary e, r;
        e.intern("a");
        e.intern("b");
        r.intern("r");
        const std::vector<kg::Triple> one{{EntityId(0), RelationId(0), EntityId(1)}};
        const auto g = kg::KnowledgeGraph::build(one, e, r);
        embed::EmbeddingTable table;
        table.dim = 1;
        table.num_entities = 2;
        table.num_relations = 3;
        table.entities = {0.5, -2.0};
        table.relations = {0.1, -0.1, 0.0};
        Rng rng(8);
        const auto clusters = gen::clusters(rng, g, table, 1);
        nn::ParamStore store(8);
        const auto m = PolicyModel::create(store, table, clusters);
        store.values(m.dwarf.att_w)[0] = 1.5;
        store.values(m.dwarf.att_a)[0] = 0.4;
        store.values(m.dwarf.att_a)[1] = -0.7;
        Tape t(&store, false);
        const double atn = vals(t, dwarf_attention(t, m, Frozen{&g, &table, &clusters}, EntityId(0)))[0];
        // neighbours of a: a itself (self loop) and b
        const double wi = 1.5 * 0.5, wj = 1.5 * -2.0;
        auto leaky = [](double x) { return x > 0 ? x : 0.2 * x; };
        const double s_self = leaky(0.4 * wi - 0.7 * wi), s_b = leaky(0.4 * wi - 0.7 * wj);
        const double a_self = std::exp(s_self) / (std::exp(s_self) + std::exp(s_b));
        CHECK(atn == doctest::Approx(a_self * wi + (1 - a_self) * wj).epsilon(1e-14));
    }
}

TEST_CASE("lambda network range") {
    Fixture f(9, 2);
    for (std::uint32_t p = 0; p < f.store.count(); ++p)
        if (f.store.name({p}).rfind("lambda.", 0) == 0)
            for (auto& v : f.store.values({p})) v = 0.0;
    Tape t(&f.store, false);
    Rng rng(1);
    const auto x = t.constant(gen::vector(rng, 8));
    CHECK(t.item(lambda_value(t, f.model, x)) == 0.5);
    f.store.values(f.model.lambda.b2)[0] = 40.0;
    Tape t2(&f.store, false);
    const double l = t2.item(lambda_value(t2, f.model, t2.constant(gen::vector(rng, 8))));
    CHECK(l < 1.0);
    CHECK(l > 0.999999);
}

TEST_CASE("walker steps are deterministic") {
    Fixture f(10, 3, 20, 4);
    const auto q = gen::queries(f.world, 3);
    std::vector<std::vector<double>> first;
    for (int run = 0; run < 2; ++run) {
        Tape t(&f.store, false);
        Walker w(t, f.model, f.world.frozen(), q[0].query_relation);
        auto s = w.start(q[0].source);
        std::vector<std::vector<double>> out;
        for (int k = 0; k < 3; ++k) {
            const auto enc = w.encode(s);
            const auto dec = w.decide(s, enc);
            out.push_back(vals(t, dec.giant_log_probs));
            out.push_back(vals(t, dec.dwarf_log_probs));
            out.push_back(vals(t, w.lambda(s, enc)));
            s = w.advance(s, enc, dec.clusters.back(), dec.actions.front());
        }
        if (run == 0) first = out;
        else CHECK(out == first);
    }
}

TEST_CASE("masked edges are removed from the source's actions") {
    Fixture f(11, 2, 20, 4);
    const auto q = gen::queries(f.world, 1)[0];
    Tape t(&f.store, false);
    Walker w(t, f.model, f.world.frozen(), q.query_relation);
    const auto s = w.start(q.source);
    const auto enc = w.encode(s);
    const std::vector<kg::Edge> masked{{q.query_relation, q.answers.front()}};
    const auto dec = w.decide(s, enc, q.source, masked);
    CHECK(std::find(dec.actions.begin(), dec.actions.end(), masked[0]) == dec.actions.end());
    CHECK(dec.actions.size() + 1 == f.world.graph.action_space(q.source).size());
}

TEST_CASE("full step objectives pass the gradient check") {
    for (auto kind : {objectives::Kind::giant, objectives::Kind::dwarf, objectives::Kind::lambda}) {
        for (std::uint64_t point = 0; point < 10; ++point) {
            const auto r = objectives::check(kind, point);
            CAPTURE(objectives::name(kind));
            CAPTURE(point);
            CAPTURE(r.worst_parameter);
            CHECK(r.entries_checked > 0);
            CHECK(r.max_relative_error < 1e-4);
        }
    }
}
