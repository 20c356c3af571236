#include <hkvar/hkvar.hpp>

#include <benchmark/benchmark.h>

#include <cmath>

using namespace hkvar;

namespace {

FuncSource product(std::size_t n) {
    return FuncSource::oracle(n, [](std::span<const double> x) {
        double v = 1.0;
        for (double xi : x) v *= xi;
        return v;
    });
}

void BM_JointIncrement(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto f = product(n);
    const Rect r = Rect::unit(n);
    for (auto _ : state) benchmark::DoNotOptimize(joint_increment(f, r));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_JointIncrement)->DenseRange(1, 10, 3);

void BM_JointIncrementRecursive(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto f = product(n);
    const Rect r = Rect::unit(n);
    for (auto _ : state) benchmark::DoNotOptimize(joint_increment_recursive(f, r));
}
BENCHMARK(BM_JointIncrementRecursive)->DenseRange(1, 10, 3);

void BM_JointDerivative(benchmark::State& state) {
    const auto z = zoo_build(state.range(0) == 0 ? "sin_product" : "cantor_product");
    const auto f = restrict_to(z.f, z.entry.rect);
    const auto sched = HSchedule::for_rect(z.entry.rect);
    const Point x = {0.3, 0.4};
    for (auto _ : state)
        benchmark::DoNotOptimize(joint_derivative(f, x, QuadrantSign::positive(2), sched));
}
BENCHMARK(BM_JointDerivative)->Arg(0)->Arg(1);

void BM_VariationOnPartition(benchmark::State& state) {
    const auto z = zoo_build("power_minus_product");
    const auto grid = GridPartition::uniform(z.entry.rect, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(variation_on_partition(z.f, grid));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.cell_count()));
}
BENCHMARK(BM_VariationOnPartition)->RangeMultiplier(4)->Range(4, 256);

void BM_TotalVariation(benchmark::State& state) {
    const auto z = zoo_build(state.range(0) == 0 ? "kink" : "power_minus_product");
    for (auto _ : state) benchmark::DoNotOptimize(total_variation(z.f, z.entry.rect, RefinePolicy{}));
}
BENCHMARK(BM_TotalVariation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_JordanDecompose(benchmark::State& state) {
    const auto z = zoo_build("neg_product");
    const auto grid = GridPartition::uniform(z.entry.rect, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(jordan_decompose(z.f, z.entry.rect, grid, RefinePolicy{}));
}
BENCHMARK(BM_JordanDecompose)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_JointMonotone(benchmark::State& state) {
    const auto z = zoo_build("cantor_product");
    const auto grid = GridPartition::uniform(z.entry.rect, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(is_jointly_monotone(z.f, grid, kMonotoneEpsilon));
}
BENCHMARK(BM_JointMonotone)->Arg(16)->Arg(64);

void BM_LebesgueMonotone(benchmark::State& state) {
    const auto z = zoo_build("sin_product");
    const auto grid = GridPartition::uniform(z.entry.rect, 16);
    const auto sched = HSchedule::for_rect(z.entry.rect);
    for (auto _ : state)
        benchmark::DoNotOptimize(check_lebesgue_monotone(z.f, z.entry.rect, grid, sched));
}
BENCHMARK(BM_LebesgueMonotone)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
