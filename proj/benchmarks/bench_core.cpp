#include <benchmark/benchmark.h>

#include <random>

#include "tequiv/construction.hpp"
#include "tequiv/lens_topology.hpp"
#include "tequiv/quotient_sings.hpp"

using namespace tequiv;

namespace {

BuildingData even_data(int r, std::size_t n) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> val(-5, 5);
    BranchMap d(r, n);
    for (std::uint64_t s = 1; s < (std::uint64_t{1} << r); ++s) {
        DivClass c(n);
        c.r = 2 * val(rng);
        c.s = 2 * val(rng);
        for (auto& a : c.a) a = 2 * val(rng);
        d.set(GVector::from_index(r, s), c);
    }
    return solve(d);
}

}  // namespace

static void BM_ClassTWitness(benchmark::State& state) {
    const std::int64_t p = state.range(0);
    for (auto _ : state)
        for (std::int64_t q = 1; q < p; ++q)
            if (std::gcd(p, q) == 1) benchmark::DoNotOptimize(class_t_witness(CyclicSing(p, q)));
    state.SetItemsProcessed(state.iterations() * (p - 1));
}
BENCHMARK(BM_ClassTWitness)->Arg(1000)->Arg(10000);

static void BM_HirzebruchJung(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(hj(CyclicSing(4 * n, 2 * n - 1)));
}
BENCHMARK(BM_HirzebruchJung)->Arg(10)->Arg(1000);

static void BM_FundamentalCycle(benchmark::State& state) {
    const auto g = ResolutionGraph::chain(y_family_by_type(state.range(0)).chain);
    for (auto _ : state) benchmark::DoNotOptimize(fundamental_cycle(g));
}
BENCHMARK(BM_FundamentalCycle)->Arg(10)->Arg(50);

static void BM_VerifyAllExhaustive(benchmark::State& state) {
    const auto data = even_data(static_cast<int>(state.range(0)), 4);
    for (auto _ : state) benchmark::DoNotOptimize(verify_all(data));
}
BENCHMARK(BM_VerifyAllExhaustive)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

static void BM_Invariants(benchmark::State& state) {
    const auto data = even_data(static_cast<int>(state.range(0)), 4);
    for (auto _ : state) benchmark::DoNotOptimize(invariants(data));
}
BENCHMARK(BM_Invariants)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_ObstructionVerdicts(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(obstruction_verdicts(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ObstructionVerdicts)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_CertifyBounded(benchmark::State& state) {
    ConstructionInput in;
    in.k = 2;
    in.factors = {{3, 6, 30, std::nullopt}, {3, 9, 45, std::nullopt}};
    in.mode = VerifyMode::bounded;
    for (auto _ : state) benchmark::DoNotOptimize(certify(in));
}
BENCHMARK(BM_CertifyBounded)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
