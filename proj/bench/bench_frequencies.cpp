// Resample fits over a lambda grid: the OpenMP kernel against the serial
// reference on the same data, plan and grid.

#include <benchmark/benchmark.h>

#include <map>

#include "binco/driver.hpp"
#include "binco/resample.hpp"
#include "binco/simgen.hpp"

namespace {

struct Fixture {
    binco::DataMatrix data;
    std::vector<double> lambdas;
    binco::ResamplePlan plan;
};

const Fixture& fixture(int p) {
    static std::map<int, Fixture> cache;
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
    const binco::EdgeSet truth = binco::gen_topology(binco::Topology::PowerLaw, p, 1, {}, 1);
    const binco::GroundTruthModel model =
        binco::gen_precision(truth, binco::SignalLevel::Strong, 2, binco::Topology::PowerLaw);
    Fixture f;
    f.data = binco::sample_mvn(model, 200, 3);
    binco::RunConfig c;
    c.lambda_points = 5;
    c.lambda_low = 0.3;
    c.lambda_high = 0.7;
    f.lambdas = binco::lambda_grid(f.data, c);
    f.plan = {binco::ResampleScheme::Bootstrap, 20, 4, f.data.n()};
    return cache.emplace(p, std::move(f)).first->second;
}

void BM_frequency_grid(benchmark::State& state) {
    const Fixture& f = fixture(static_cast<int>(state.range(0)));
    binco::ResampleOptions options;
    options.workers = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(binco::frequency_grid(f.data, f.lambdas, 1.0, f.plan, options));
}

void BM_frequency_grid_serial(benchmark::State& state) {
    const Fixture& f = fixture(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(binco::frequency_grid_serial(f.data, f.lambdas, 1.0, f.plan));
}

}  // namespace

BENCHMARK(BM_frequency_grid)->ArgsProduct({{50, 100}, {1, 2, 4}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_frequency_grid_serial)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
