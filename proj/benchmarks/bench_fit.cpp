#include "pcboost/gbrt.hpp"
#include "pcboost/pipeline.hpp"
#include "pcboost/svr.hpp"
#include "pcboost/tuning.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

using namespace pcboost;

namespace {

std::pair<Matrix, std::vector<double>> synthetic(std::size_t n, std::size_t d) {
    std::mt19937_64 eng(n * 131 + d);
    std::uniform_real_distribution<double> u(0, 1);
    Matrix X(n, d);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) X(i, j) = u(eng);
        y[i] = X(i, 0) * X(i, 1 % d) + 0.1 * u(eng);
    }
    return {std::move(X), std::move(y)};
}

void BM_GbrtFit(benchmark::State& state) {
    const auto [X, y] = synthetic(static_cast<std::size_t>(state.range(0)), 4);
    gbrt::HyperParams p;
    p.n_estimators = 100;
    p.max_depth = 5;
    p.subsample = 0.7;
    for (auto _ : state) benchmark::DoNotOptimize(gbrt::fit(X, y, p));
}
BENCHMARK(BM_GbrtFit)->Arg(19)->Arg(200)->Arg(2000);

void BM_SvrFit(benchmark::State& state) {
    const auto [X, y] = synthetic(static_cast<std::size_t>(state.range(0)), 4);
    svr::HyperParams p;
    p.C = 10;
    p.epsilon = 0.05;
    for (auto _ : state) benchmark::DoNotOptimize(svr::fit(X, y, p));
}
BENCHMARK(BM_SvrFit)->Arg(19)->Arg(200)->Arg(1000);

void BM_GridSearchQuick(benchmark::State& state) {
    const auto [X, y] = synthetic(19, 4);
    std::vector<std::size_t> rows(19);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    const tuning::IndexedSource src(X, y, rows);
    const auto cfg = Config::load(std::filesystem::path(PCBOOST_BENCH_DATA_DIR) / "grids" / "quick.cfg");
    const auto grid = tuning::HyperGrid::from_config(cfg, state.range(0) == 0 ? Family::Gbrt : Family::Svr);
    for (auto _ : state) benchmark::DoNotOptimize(tuning::grid_search(src, grid));
}
BENCHMARK(BM_GridSearchQuick)->Arg(0)->Arg(1);

void BM_Reproduce(benchmark::State& state) {
    const std::filesystem::path dir = PCBOOST_BENCH_DATA_DIR;
    const auto ds = load_csv(dir / "pervious.csv");
    const auto ref = pipeline::load_reference(dir / "reference_results.cfg");
    for (auto _ : state) benchmark::DoNotOptimize(pipeline::reproduce(ds, ref));
}
BENCHMARK(BM_Reproduce);

} // namespace
BENCHMARK_MAIN();
