#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "duokg/synthetic.hpp"
#include "support/generators.hpp"

using namespace duokg;
using namespace duokg::kg;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("duokg_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

std::vector<Triple> parse(const std::string& text, Vocabulary& ents, Vocabulary& rels) {
    std::istringstream in(text);
    return parse_triples(in, ents, rels);
}

Triple t(std::uint32_t h, std::uint32_t r, std::uint32_t tail) { return {EntityId(h), RelationId(r), EntityId(tail)}; }

}  // namespace

TEST_CASE("whale is a mammal parses to dense ids") {
    Vocabulary e, r;
    const auto triples = parse("whale\tis_a\tmammal\n", e, r);
    REQUIRE(triples.size() == 1);
    CHECK(triples[0] == t(0, 0, 1));
    CHECK(e.name(0) == "whale");
    CHECK(e.name(1) == "mammal");
    CHECK(r.name(0) == "is_a");
}

TEST_CASE("empty triple file gives empty vocabularies") {
    const auto dir = temp_dir("empty");
    std::ofstream(dir / "x.tsv").close();
    const auto f = load_triples(dir / "x.tsv");
    CHECK(f.triples.empty());
    CHECK(f.entities.empty());
    CHECK(f.relations.empty());
}

TEST_CASE("repeated entity counted once") {
    Vocabulary e, r;
    const auto triples = parse("a\tr\tb\nb\tr\tc\n\nc\ts\td\n", e, r);
    CHECK(triples.size() == 3);
    CHECK(e.size() == 4);
    CHECK(r.size() == 2);
}

TEST_CASE("malformed line reports its line number") {
    Vocabulary e, r;
    try {
        parse("a\tr\tb\na\tr\n", e, r);
        FAIL("expected a parse error");
    } catch (const ParseError& err) {
        CHECK(err.line() == 2);
    }
    CHECK_THROWS_AS(load_triples("/nonexistent/file.tsv"), IoError);
}

TEST_CASE("minimal graph with inverse and self loop") {
    Vocabulary e, r;
    const auto triples = parse("a\tr\tb\n", e, r);
    const auto g = KnowledgeGraph::build(triples, e, r);
    const RelationId inv = g.inverse_of(RelationId(0));
    CHECK(g.relations().name(inv.index()) == "r^-1");
    const std::vector<Edge> a{{RelationId(0), EntityId(1)}, {g.no_op(), EntityId(0)}};
    const std::vector<Edge> b{{inv, EntityId(0)}, {g.no_op(), EntityId(1)}};
    auto as = g.action_space(EntityId(0));
    auto bs = g.action_space(EntityId(1));
    CHECK(std::vector<Edge>(as.begin(), as.end()) == a);
    CHECK(std::vector<Edge>(bs.begin(), bs.end()) == b);
    CHECK(g.edge_count() == 4);
}

TEST_CASE("self loops only") {
    Vocabulary e, r;
    e.intern("x");
    e.intern("y");
    r.intern("r");
    const auto g = build_graph({}, e, r, true, true);
    CHECK(g.edge_count() == 2);
    auto s = g.action_space(EntityId(1));
    REQUIRE(s.size() == 1);
    CHECK(s[0] == Edge{g.no_op(), EntityId(1)});
}

TEST_CASE("action space sizes") {
    Vocabulary e, r;
    SUBCASE("two outgoing base edges without inverses") {
        const auto triples = parse("a\tp\tb\na\tq\tc\n", e, r);
        const auto g = build_graph(triples, e, r, false, true);
        CHECK(g.action_space(EntityId(0)).size() == 3);
    }
    SUBCASE("node of out-degree 14") {
        std::string text;
        for (int i = 0; i < 14; ++i) text += "hub\tlinks\tleaf" + std::to_string(i) + "\n";
        const auto triples = parse(text, e, r);
        const auto g = KnowledgeGraph::build(triples, e, r);
        CHECK(g.action_space(EntityId(0)).size() == 15);
        CHECK(degree_stats(g).median == 0.0);
    }
}

TEST_CASE("degree statistics") {
    Vocabulary e, r;
    SUBCASE("two entities one edge") {
        const auto g = KnowledgeGraph::build(parse("a\tr\tb\n", e, r), e, r);
        const auto s = degree_stats(g);
        CHECK(s.mean == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(s.median == 0.0);
    }
    SUBCASE("star with five leaves") {
        std::string text;
        for (int i = 0; i < 5; ++i) text += "c\tr\tl" + std::to_string(i) + "\n";
        const auto g = KnowledgeGraph::build(parse(text, e, r), e, r);
        const auto s = degree_stats(g);
        CHECK(s.mean == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
        CHECK(s.median == 0.0);
    }
    SUBCASE("empty graph") {
        const auto g = KnowledgeGraph::build({}, e, r);
        CHECK_THROWS(degree_stats(g));
    }
}

TEST_CASE("graph invariants on random graphs") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng rng(seed);
        const std::size_t n = 2 + rng.below(30), R = 1 + rng.below(5), m = rng.below(120);
        const auto d = gen::dataset(rng, n, R, m);
        const auto g = KnowledgeGraph::build(d.facts, d.entities, d.relations);
        CAPTURE(seed);

        // independent recount of the expected edge set
        std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> expected;
        for (const auto& f : d.facts) {
            expected.insert({f.head.value, f.relation.value, f.tail.value});
            expected.insert({f.tail.value, static_cast<std::uint32_t>(f.relation.value + R), f.head.value});
        }
        for (std::uint32_t i = 0; i < n; ++i) expected.insert({i, static_cast<std::uint32_t>(2 * R), i});

        std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> got;
        std::size_t total = 0;
        for (std::uint32_t i = 0; i < n; ++i) {
            const auto acts = g.action_space(EntityId(i));
            CHECK(std::is_sorted(acts.begin(), acts.end()));
            CHECK(std::adjacent_find(acts.begin(), acts.end()) == acts.end());
            CHECK(std::count(acts.begin(), acts.end(), Edge{g.no_op(), EntityId(i)}) == 1);
            for (const auto& a : acts) {
                got.insert({i, a.relation.value, a.target.value});
                if (g.is_base(a.relation)) {
                    const auto back = g.action_space(a.target);
                    CHECK(std::binary_search(back.begin(), back.end(), Edge{g.inverse_of(a.relation), EntityId(i)}));
                }
            }
            total += acts.size();
        }
        CHECK(got == expected);
        CHECK(total == g.edge_count());
    }
}

TEST_CASE("edge count is 2|T| + |E| for duplicate-free triples") {
    Rng rng(7);
    const auto d = gen::dataset(rng, 40, 4, 100);
    std::set<Triple> unique(d.facts.begin(), d.facts.end());
    std::vector<Triple> facts(unique.begin(), unique.end());
    // a triple and its reversed inverse can coincide only for r(a,a); drop those
    std::erase_if(facts, [](const Triple& x) { return x.head == x.tail; });
    const auto g = KnowledgeGraph::build(facts, d.entities, d.relations);
    CHECK(g.edge_count() == 2 * facts.size() + d.entities.size());
    CHECK(g.duplicates_removed() == 0);

    auto dup = facts;
    dup.push_back(facts.front());
    const auto g2 = KnowledgeGraph::build(dup, d.entities, d.relations);
    CHECK(g2.duplicates_removed() == 1);
    CHECK(g2.edge_count() == g.edge_count());
}

TEST_CASE("vocabulary round trip keeps indices") {
    Vocabulary v;
    for (const char* s : {"zeta", "alpha", "mu", "alpha"}) v.intern(s);
    std::stringstream io;
    v.write(io);
    const auto back = Vocabulary::read(io);
    CHECK(back == v);
    CHECK(back.find("mu") == std::optional<std::uint32_t>(2));
}

TEST_CASE("queries, answer index and leakage") {
    Rng rng(3);
    auto d = gen::dataset(rng, 30, 3, 80);
    d.test.assign(d.facts.begin(), d.facts.begin() + 10);
    const auto edges = d.graph_edges();
    for (const auto& x : d.test) CHECK(std::find(edges.begin(), edges.end(), x) == edges.end());

    const auto q = group_queries(d.facts);
    std::size_t answers = 0;
    for (const auto& s : q) {
        CHECK(std::is_sorted(s.answers.begin(), s.answers.end()));
        CHECK(!s.answers.empty());
        answers += s.answers.size();
    }
    CHECK(answers == std::set<Triple>(d.facts.begin(), d.facts.end()).size());

    AnswerIndex idx;
    idx.add(d.facts);
    for (const auto& x : d.facts) CHECK(idx.contains(x.head, x.relation, x.tail));
}

TEST_CASE("dataset save and load round trip") {
    const auto d = make_planted_rule({});
    const auto dir = temp_dir("roundtrip");
    save_dataset(dir, d);
    const auto back = load_dataset(dir);
    CHECK(back.entities.size() == d.entities.size());
    CHECK(back.train.size() == d.train.size());
    CHECK(back.test.size() == d.test.size());
    CHECK(back.facts.size() == d.facts.size());
}

TEST_CASE("planted rule answers need exactly the rule length") {
    for (std::size_t hops : {3u, 5u}) {
        PlantedRuleConfig cfg;
        cfg.hops = hops;
        cfg.entities_per_layer = 20;
        cfg.seed = 11;
        const auto d = make_planted_rule(cfg);
        const auto g = KnowledgeGraph::build(d.graph_edges(), d.entities, d.relations);
        const RelationId query = d.test.front().relation;
        for (const auto& f : d.facts) CHECK(f.relation != query);
        for (const auto& x : d.test) CHECK(shortest_path_length(g, x.head, x.tail, 10) == static_cast<int>(hops));
        CHECK(d.relations.size() == hops + 1 + cfg.noise_relations);
    }
}
