#include <benchmark/benchmark.h>

#include "smock/metric.hpp"
#include "smock/pattern.hpp"
#include "smock/raster.hpp"
#include "smock/rng.hpp"

using namespace smock;

namespace {

PatternSpec lattice_2x1() {
    PatternSpec spec;
    spec.name = "lattice_2x1";
    spec.generators.push_back({"seg", {Component::segment({0, 0}, {1, 0})}, {0, 0}});
    spec.lattice = Lattice{{2, 0}, {0, 1}};
    return spec;
}

void bm_smocked_distance(benchmark::State& state) {
    auto spec = lattice_2x1();
    Smocked sm(spec);
    double half = double(state.range(0));
    AxisBox box{{-half, -half}, {half, half}};
    int t = 0;
    for (auto _ : state) {
        Vec2 v = uniform_in_box(1, t, box, 0);
        Vec2 w = uniform_in_box(1, t, box, 1);
        benchmark::DoNotOptimize(sm.value(v, w));
        ++t;
    }
}
BENCHMARK(bm_smocked_distance)->Arg(5)->Arg(10)->Arg(20);

void bm_fast_bracket(benchmark::State& state) {
    auto spec = lattice_2x1();
    Smocked sm(spec);
    AxisBox box{{-500, -500}, {500, 500}};
    int t = 0;
    for (auto _ : state) {
        Vec2 v = uniform_in_box(2, t, box, 0);
        Vec2 w = uniform_in_box(2, t, box, 1);
        benchmark::DoNotOptimize(sm.fast_bracket(v, w));
        ++t;
    }
}
BENCHMARK(bm_fast_bracket);

void bm_rasterize_rho(benchmark::State& state) {
    auto spec = lattice_2x1();
    int n = int(state.range(0));
    for (auto _ : state) {
        auto raster = rasterize_rho(spec, {0.5, 0.0}, AxisBox{{-4.5, -5.0}, {5.5, 5.0}}, n);
        benchmark::DoNotOptimize(raster.values.back());
    }
}
BENCHMARK(bm_rasterize_rho)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
