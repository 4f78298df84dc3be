#include "funreg/population.hpp"
#include "funreg/selection.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace pop = funreg::population;

namespace {

std::pair<funreg::FunctionalSample, funreg::FunctionalSample> standard_sample(long points, long n)
{
    return pop::simulate(pop::standard_model(points, 0.05), n, 1);
}

funreg::Bandwidth default_h(const funreg::Grid& g)
{
    return funreg::Bandwidth(1.6 * g.max_spacing());
}

void BM_SmoothSurface(benchmark::State& state)
{
    const auto g = funreg::Grid::uniform(0.0, 1.0, static_cast<std::size_t>(state.range(0)));
    Eigen::MatrixXd raw(g.size(), g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
            raw(i, j) = std::sin(g[i] + 2.0 * g[j]);
    const funreg::Surface s(g, g, raw);
    for (auto _ : state)
        benchmark::DoNotOptimize(funreg::smooth_surface(s, default_h(g), g, g));
}
BENCHMARK(BM_SmoothSurface)->Arg(20)->Arg(40)->Arg(80);

void BM_Fit(benchmark::State& state)
{
    const auto [x, y] = standard_sample(40, state.range(0));
    const auto method = state.range(1) == 0 ? funreg::Method::fcr : funreg::Method::fpr;
    for (auto _ : state)
        benchmark::DoNotOptimize(funreg::fit(method, x, y, default_h(x.grid()), 2));
    state.SetLabel(std::string(funreg::to_string(method)));
}
BENCHMARK(BM_Fit)->ArgsProduct({{100, 400}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Loocv(benchmark::State& state)
{
    const auto [x, y] = standard_sample(40, state.range(0));
    funreg::TuningGrid grid;
    grid.bandwidths = {default_h(x.grid())};
    grid.truncations = {1, 2, 3};
    for (auto _ : state)
        benchmark::DoNotOptimize(funreg::loocv(x, y, grid));
}
BENCHMARK(BM_Loocv)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
