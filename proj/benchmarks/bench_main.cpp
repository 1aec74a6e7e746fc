#include <benchmark/benchmark.h>

#include <numbers>

#include "simfocus/allocation.hpp"
#include "simfocus/channel.hpp"
#include "simfocus/optimizer.hpp"
#include "simfocus/propagation.hpp"

using namespace simfocus;

namespace {

struct Fixture {
    SceneGeometry scene;
    PropagationSet prop;
    ChannelSet channel;
    ZfTarget target;
    SimState state;
};

Fixture make_fixture(int atoms_per_side, int layers) {
    SceneConfig cfg;
    cfg.atoms_per_side = atoms_per_side;
    cfg.layers = layers;
    Rng rng(1);
    SceneGeometry scene = build_scene(cfg, rng);
    PropagationSet prop = build_propagation(scene);
    ChannelSet channel = nearfield_channel(scene, GainMode::normalized);
    ZfTarget target = zf_target(channel.matrix);
    Eigen::ArrayXXd phases(layers, atoms_per_side * atoms_per_side);
    Rng draw(2);
    for (int l = 0; l < layers; ++l)
        for (int m = 0; m < phases.cols(); ++m)
            phases(l, m) = draw.uniform(0.0, 2.0 * std::numbers::pi);
    SimState state(phases, AmplitudeMode::coupled);
    return {std::move(scene), std::move(prop), std::move(channel), std::move(target),
            std::move(state)};
}

} // namespace

static void BM_BuildPropagation(benchmark::State& state) {
    SceneConfig cfg;
    cfg.atoms_per_side = static_cast<int>(state.range(0));
    cfg.layers = 6;
    Rng rng(1);
    const SceneGeometry scene = build_scene(cfg, rng);
    for (auto _ : state) {
        auto prop = build_propagation(scene);
        benchmark::DoNotOptimize(prop);
    }
}
BENCHMARK(BM_BuildPropagation)->Arg(7)->Arg(15);

static void BM_SimResponse(benchmark::State& state) {
    const auto f = make_fixture(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        auto g = sim_response(f.state, f.prop);
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(BM_SimResponse)->Args({7, 6})->Args({15, 12});

static void BM_Gradient(benchmark::State& state) {
    const auto f = make_fixture(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        auto g = gradient(f.state, f.prop, f.target, f.channel.matrix);
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(BM_Gradient)->Args({7, 6})->Args({15, 12});

static void BM_WaterFilling(benchmark::State& state) {
    const auto f = make_fixture(7, 3);
    const Eigen::MatrixXcd q = end_to_end(f.channel.matrix, sim_response(f.state, f.prop));
    const Eigen::VectorXd noise = Eigen::VectorXd::Constant(q.rows(), 1e-12);
    for (auto _ : state) {
        auto alloc = water_filling(q, noise, 1e-3);
        benchmark::DoNotOptimize(alloc);
    }
}
BENCHMARK(BM_WaterFilling);

static void BM_HeatmapSampling(benchmark::State& state) {
    const auto f = make_fixture(15, 2);
    const Eigen::MatrixXcd g = sim_response(f.state, f.prop);
    const HeatmapSpec spec{-2.5, 2.5, 25, 0.0, 10.0, 50, EnergyMode::incoherent};
    for (auto _ : state) {
        auto grid = heatmap(f.scene, g, spec);
        benchmark::DoNotOptimize(grid);
    }
    state.SetItemsProcessed(state.iterations() * 25 * 50);
}
BENCHMARK(BM_HeatmapSampling);

BENCHMARK_MAIN();
