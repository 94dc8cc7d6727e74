// Serial reference vs OpenMP version of each parallel kernel. The argument of
// the parallel variants is the worker count.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "duokg/embed.hpp"
#include "duokg/infer.hpp"
#include "duokg/log.hpp"
#include "duokg/train.hpp"
#include "support/generators.hpp"

using namespace duokg;

namespace {

struct Points {
    std::size_t n = 20000, dim = 50, k = 100;
    std::vector<double> points, centroids;
    Points() {
        Rng rng(1);
        points = gen::vector(rng, n * dim);
        centroids = gen::vector(rng, k * dim);
    }
};

const Points& points() {
    static const Points p;
    return p;
}

struct Model {
    gen::World world;
    nn::ParamStore store{7};
    agents::PolicyModel model;
    std::vector<kg::QuerySample> queries;
    std::vector<env::DualRollout> rollouts;
    train::TrainConfig config;

    Model() {
        log::set_level(log::Level::quiet);
        Rng rng(7);
        world = gen::world(rng, 300, 10, 1500, 16, 8);
        model = agents::PolicyModel::create(store, world.table, world.clusters);
        queries = gen::queries(world, 32);
        config.path_length = 3;
        rollouts = train::collect_rollouts(policy(), queries, config, 0, 0, 8);
    }
    agents::Policy policy() const { return {&model, &store, world.frozen()}; }
};

const Model& model() {
    static const Model m;
    return m;
}

void BM_assign_nearest_serial(benchmark::State& state) {
    const auto& p = points();
    std::vector<std::uint32_t> a;
    for (auto _ : state) benchmark::DoNotOptimize(embed::assign_nearest_reference(p.points, p.n, p.dim, p.centroids, p.k, a));
}

void BM_assign_nearest_omp(benchmark::State& state) {
    const auto& p = points();
    omp_set_num_threads(static_cast<int>(state.range(0)));
    std::vector<std::uint32_t> a;
    for (auto _ : state) benchmark::DoNotOptimize(embed::assign_nearest(p.points, p.n, p.dim, p.centroids, p.k, a));
}

void BM_collect_rollouts_serial(benchmark::State& state) {
    const auto& m = model();
    for (auto _ : state)
        benchmark::DoNotOptimize(train::collect_rollouts_reference(m.policy(), m.queries, m.config, 0, 0, 8));
}

void BM_collect_rollouts_omp(benchmark::State& state) {
    const auto& m = model();
    auto cfg = m.config;
    cfg.workers = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(train::collect_rollouts(m.policy(), m.queries, cfg, 0, 0, 8));
}

void BM_policy_gradient_serial(benchmark::State& state) {
    const auto& m = model();
    for (auto _ : state) benchmark::DoNotOptimize(train::policy_gradient_reference(m.policy(), m.rollouts, m.config));
}

void BM_policy_gradient_omp(benchmark::State& state) {
    const auto& m = model();
    auto cfg = m.config;
    cfg.workers = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(train::policy_gradient(m.policy(), m.rollouts, cfg));
}

void BM_evaluate_serial(benchmark::State& state) {
    const auto& m = model();
    kg::AnswerIndex known;
    known.add(m.world.data.facts);
    const std::span<const kg::Triple> triples(m.world.data.facts.data(), 64);
    for (auto _ : state)
        benchmark::DoNotOptimize(infer::evaluate_reference(m.policy(), triples, known, infer::BeamConfig{20, 3}));
}

void BM_evaluate_omp(benchmark::State& state) {
    const auto& m = model();
    kg::AnswerIndex known;
    known.add(m.world.data.facts);
    const std::span<const kg::Triple> triples(m.world.data.facts.data(), 64);
    const auto workers = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(infer::evaluate(m.policy(), triples, known, infer::BeamConfig{20, 3}, workers));
}

void workers(benchmark::internal::Benchmark* b) {
    const int max = std::max(1, omp_get_num_procs());
    for (int w = 1; w <= max; w *= 2) b->Arg(w);
    b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_assign_nearest_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assign_nearest_omp)->Apply(workers);
BENCHMARK(BM_collect_rollouts_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_collect_rollouts_omp)->Apply(workers);
BENCHMARK(BM_policy_gradient_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_policy_gradient_omp)->Apply(workers);
BENCHMARK(BM_evaluate_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evaluate_omp)->Apply(workers);

BENCHMARK_MAIN();
