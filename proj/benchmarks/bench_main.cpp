#include <benchmark/benchmark.h>

#include "hermitia/curvature.hpp"
#include "hermitia/flow.hpp"
#include "hermitia/jet.hpp"
#include "hermitia/samples.hpp"

using namespace hermitia;

namespace {

Jet random_jet(int n, int order, Rng& rng) {
    Jet j(n, order);
    for (int k = 0; k < j.size(); ++k) j[k] = random_complex(rng);
    return j;
}

void BM_JetMultiply(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int order = static_cast<int>(state.range(1));
    Rng rng(3);
    const auto a = random_jet(n, order, rng);
    const auto b = random_jet(n, order, rng);
    for (auto _ : state) benchmark::DoNotOptimize(mul(a, b));
}
BENCHMARK(BM_JetMultiply)->Args({2, 2})->Args({2, 4})->Args({3, 3})->Args({4, 2});

void BM_ChernCurvature(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(5);
    const auto field = MetricField::normal_form(random_normal_form(n, rng));
    const Point z(n, cplx(0.05, -0.02));
    for (auto _ : state) {
        const auto mj = metric_jet(field, z, 2);
        benchmark::DoNotOptimize(curvature_chern(mj));
    }
}
BENCHMARK(BM_ChernCurvature)->Arg(2)->Arg(3)->Arg(4);

void BM_RicciFamily(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(7);
    const auto field = MetricField::normal_form(random_normal_form(n, rng));
    const auto mj = metric_jet(field, Point(n, cplx(0.0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(ricci_family(mj));
}
BENCHMARK(BM_RicciFamily)->Arg(2)->Arg(3);

void BM_FlowStep(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    Rng rng(11);
    const auto s = FlowState::sample(kahler_torus(2, rng), N, 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(step(s));
    state.SetItemsProcessed(state.iterations() * s.sites());
}
BENCHMARK(BM_FlowStep)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
