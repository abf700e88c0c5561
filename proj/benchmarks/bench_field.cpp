#include <benchmark/benchmark.h>

#include "ortholap/map.hpp"
#include "ortholap/mollify.hpp"
#include "ortholap/network.hpp"
#include "ortholap/rates.hpp"

using namespace ortholap;

namespace {

// The extension keeps a pointer to its map, so both live as function-local
// statics: the map stays put for the lifetime of the process.
const ExtendedField& shared_extension() {
    static const OrthodiagonalMap map =
        generate_square(DomainDescriptor::disk({0.0, 0.0}, 1.0), 1.0 / 32.0);
    static const ExtendedField ext = [] {
        const WeightedNetwork net = build_network(map, Side::Primal);
        DiscreteField f = solve_dirichlet(
            net, boundary_values_from(net, [](Vec2 p) { return p.x * p.x - p.y * p.y; }));
        return ExtendedField(map, std::move(f));
    }();
    return ext;
}

}  // namespace

static void BM_ExtendedFieldValue(benchmark::State& state) {
    const ExtendedField& ext = shared_extension();
    const Vec2 points[4] = {{0.11, 0.07}, {-0.42, 0.33}, {0.25, -0.58}, {-0.03, -0.01}};
    int k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ext.value(points[k & 3]));
        ++k;
    }
}
BENCHMARK(BM_ExtendedFieldValue);

static void BM_ConvolvedLaplacian(benchmark::State& state) {
    const ExtendedField& ext = shared_extension();
    const Mollifier bump = make_mollifier(0.2);
    const double step = bump.delta / static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(convolved_laplacian(ext, bump, {0.0, 0.0}, step));
    }
}
BENCHMARK(BM_ConvolvedLaplacian)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_LambdaRate(benchmark::State& state) {
    const int grid_n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        RateResult res = lambda_rate(0.2, 0.4, grid_n);
        benchmark::DoNotOptimize(res.lambda);
    }
}
BENCHMARK(BM_LambdaRate)->Arg(1024)->Arg(4096)->Unit(benchmark::kMicrosecond);

static void BM_Bootstrap(benchmark::State& state) {
    for (auto _ : state) {
        BootstrapResult res = bootstrap(0.25, 200);
        benchmark::DoNotOptimize(res.sequence.data());
    }
}
BENCHMARK(BM_Bootstrap);
