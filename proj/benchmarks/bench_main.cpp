#include <benchmark/benchmark.h>

#include <cmath>
#include <map>

#include "aslb/covering.hpp"
#include "aslb/folding.hpp"
#include "aslb/funcspace.hpp"
#include "aslb/packing.hpp"

using namespace aslb;

namespace {

const SampledFunction& takagi(std::size_t n) {
    static std::map<std::size_t, SampledFunction> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, sample_function(takagi_generator(TakagiSpec{}), 0, 1, n)).first;
    return it->second;
}

}  // namespace

static void BM_TakagiSampling(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Generator g = takagi_generator(TakagiSpec{});
    for (auto _ : state) benchmark::DoNotOptimize(sample_function(g, 0, 1, n));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TakagiSampling)->RangeMultiplier(4)->Range(1 << 12, 1 << 18)->Unit(benchmark::kMillisecond);

static void BM_TakagiExtended(benchmark::State& state) {
    TakagiSpec t;
    t.truncation_tol = 1e-18;
    const int last = t.last_term();
    long double x = 0.123456789L;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval_takagi<long double>(t, x, last));
        x += 1e-7L;
    }
}
BENCHMARK(BM_TakagiExtended);

static void BM_ColumnCoverCount(benchmark::State& state) {
    const SampledFunction& f = takagi((std::size_t{1} << 20) + 1);
    const double r = std::ldexp(1.0, -static_cast<int>(state.range(0)));
    const Square whole{0.5, 0.5, 0.5};
    for (auto _ : state) benchmark::DoNotOptimize(column_cover_count(f, whole, r));
}
BENCHMARK(BM_ColumnCoverCount)->DenseRange(6, 14, 4)->Unit(benchmark::kMillisecond);

static void BM_SpectrumAtTheta(benchmark::State& state) {
    const SampledFunction& f = takagi((std::size_t{1} << 18) + 1);
    const double theta = static_cast<double>(state.range(0)) / 10;
    const auto ladders = default_R_ladders(f, theta, 1, 5);
    const double centers[] = {0.2, 0.4, 0.6, 0.8};
    for (auto _ : state) benchmark::DoNotOptimize(spectrum_at_theta(f, theta, ladders.front(), centers));
}
BENCHMARK(BM_SpectrumAtTheta)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

static void BM_FoldRectangle(benchmark::State& state) {
    std::vector<double> y(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 40 * std::sin(0.01 * static_cast<double>(i));
    for (auto _ : state) benchmark::DoNotOptimize(fold_rectangle(y, {-1, 1}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FoldRectangle)->Range(1 << 10, 1 << 16);

static void BM_BuildAndAuditPacking(benchmark::State& state) {
    const long long n = state.range(0);
    PackingAuditOptions opt;
    opt.exact_recheck = true;
    for (auto _ : state) {
        const PackingSet ps = build_packing(3, 0.5, n, default_c0(3), ZigzagVariant::plain);
        benchmark::DoNotOptimize(audit_packing(ps, opt));
    }
}
BENCHMARK(BM_BuildAndAuditPacking)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_PEnergy(benchmark::State& state) {
    ZigzagSpec z;
    z.s = 3;
    for (auto _ : state) benchmark::DoNotOptimize(p_energy(z, 2, state.range(0)));
}
BENCHMARK(BM_PEnergy)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
