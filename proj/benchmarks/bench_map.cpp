#include <benchmark/benchmark.h>

#include "ortholap/map.hpp"

using namespace ortholap;

static void BM_GenerateSquareDisk(benchmark::State& state) {
    const auto dom = DomainDescriptor::disk({0.0, 0.0}, 1.0);
    const double eps = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) {
        OrthodiagonalMap m = generate_square(dom, eps);
        benchmark::DoNotOptimize(m.quad_count());
    }
}
BENCHMARK(BM_GenerateSquareDisk)->Arg(16)->Arg(64)->Arg(128);

static void BM_ValidateDisk(benchmark::State& state) {
    const auto dom = DomainDescriptor::disk({0.0, 0.0}, 1.0);
    const OrthodiagonalMap m = generate_square(dom, 1.0 / 64.0);
    for (auto _ : state) {
        ValidationReport rep = validate(m);
        benchmark::DoNotOptimize(rep.ok());
    }
}
BENCHMARK(BM_ValidateDisk);

BENCHMARK_MAIN();
