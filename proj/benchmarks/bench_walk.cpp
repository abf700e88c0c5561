#include <benchmark/benchmark.h>

#include <cstdint>

#include "ortholap/map.hpp"
#include "ortholap/network.hpp"
#include "ortholap/walk.hpp"

using namespace ortholap;

static void BM_WalkToAbsorption(benchmark::State& state) {
    const auto dom = DomainDescriptor::disk({0.0, 0.0}, 1.0);
    const OrthodiagonalMap m = generate_square(dom, 1.0 / static_cast<double>(state.range(0)));
    const WeightedNetwork net = build_network(m, Side::Primal);
    const WalkEngine engine(net);
    const int start = net.net_index[static_cast<std::size_t>(nearest_primal_vertex(m, {0, 0}))];
    long trial = 0;
    for (auto _ : state) {
        SplitMix64 rng(trial_seed(0xBE9C9u, trial++));
        WalkEngine::Outcome out = engine.run(start, rng, 10'000'000);
        benchmark::DoNotOptimize(out.final_index);
    }
}
BENCHMARK(BM_WalkToAbsorption)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);
