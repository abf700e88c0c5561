#include <benchmark/benchmark.h>

#include "ortholap/map.hpp"
#include "ortholap/mollify.hpp"
#include "ortholap/network.hpp"

using namespace ortholap;

static void BM_BuildNetwork(benchmark::State& state) {
    const auto dom = DomainDescriptor::disk({0.0, 0.0}, 1.0);
    const OrthodiagonalMap m = generate_square(dom, 1.0 / static_cast<double>(state.range(0)));
    for (auto _ : state) {
        WeightedNetwork net = build_network(m, Side::Primal);
        benchmark::DoNotOptimize(net.size());
    }
}
BENCHMARK(BM_BuildNetwork)->Arg(16)->Arg(64);

static void BM_SolveDirichlet(benchmark::State& state) {
    const auto dom = DomainDescriptor::disk({0.0, 0.0}, 1.0);
    const OrthodiagonalMap m = generate_square(dom, 1.0 / static_cast<double>(state.range(0)));
    const WeightedNetwork net = build_network(m, Side::Primal);
    const std::vector<double> data =
        boundary_values_from(net, [](Vec2 p) { return p.x * p.x - p.y * p.y; });
    for (auto _ : state) {
        DiscreteField f = solve_dirichlet(net, data);
        benchmark::DoNotOptimize(f.values.data());
    }
}
BENCHMARK(BM_SolveDirichlet)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_WindowedResidual(benchmark::State& state) {
    const auto dom = DomainDescriptor::disk({0.0, 0.0}, 1.0);
    const OrthodiagonalMap m = generate_square(dom, 1.0 / 64.0);
    for (auto _ : state) {
        LaplacianResidual res = averaged_laplacian_residual(m, quadratic_radial(), {0.1, 0.0}, 0.5);
        benchmark::DoNotOptimize(res.residual);
    }
}
BENCHMARK(BM_WindowedResidual);
