// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <vector>

#include "clp/data/epoch_plan.hpp"
#include "clp/detect/detector.hpp"
#include "clp/nn/network.hpp"
#include "clp/nn/params.hpp"
#include "clp/rng.hpp"
#include "clp/rotation/rotation.hpp"

using namespace clp;

namespace {

nn::Batch make_batch(const nn::ModelSpec& spec, std::size_t count) {
    auto e = rng::make_engine(3);
    nn::Batch b;
    b.inputs.resize(count * nn::shape_size(spec.input_shape));
    for (auto& x : b.inputs) x = static_cast<float>(rng::uniform01(e));
    for (std::size_t i = 0; i < count; ++i) b.labels.push_back(static_cast<std::int32_t>(i % spec.classes));
    return b;
}

void BM_MlpForwardBackward(benchmark::State& state) {
    const auto spec = nn::make_mlp({1, 12, 12}, {64, 64}, 10);
    const auto params = nn::init_params(spec, 1);
    const auto batch = make_batch(spec, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto fwd = nn::forward(params, spec, batch);
        benchmark::DoNotOptimize(nn::backward(params, spec, fwd.cache));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpForwardBackward)->Arg(64)->Arg(256);

void BM_ConvForwardBackward(benchmark::State& state) {
    const auto spec = nn::ModelSpec::parse("conv2d:8:3 relu flatten dense:10 softmax-ce", {1, 12, 12}, 10);
    const auto params = nn::init_params(spec, 1);
    const auto batch = make_batch(spec, 64);
    for (auto _ : state) {
        auto fwd = nn::forward(params, spec, batch);
        benchmark::DoNotOptimize(nn::backward(params, spec, fwd.cache));
    }
    state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_ConvForwardBackward);

void BM_CosineDistance(benchmark::State& state) {
    auto e = rng::make_engine(2);
    std::vector<double> a(static_cast<std::size_t>(state.range(0))), b(a.size());
    for (auto& v : a) v = rng::normal(e);
    for (auto& v : b) v = rng::normal(e);
    for (auto _ : state) benchmark::DoNotOptimize(rotation::cosine_distance(a, b));
    state.SetBytesProcessed(state.iterations() * state.range(0) * 16);
}
BENCHMARK(BM_CosineDistance)->Arg(1 << 10)->Arg(1 << 16)->Arg(1 << 20);

void BM_DetectorStep(benchmark::State& state) {
    detect::DetectorConfig c;
    c.total_epochs = 1 << 30;
    c.arm_before_fire = true;
    for (auto _ : state) {
        detect::CriticalDetector det(c);
        for (int i = 0; i < 200; ++i) benchmark::DoNotOptimize(det.step(i, 0.01 * i));
    }
    state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_DetectorStep);

void BM_PlanEpoch(benchmark::State& state) {
    int epoch = 0;
    for (auto _ : state) benchmark::DoNotOptimize(data::plan_epoch(50000, 3.0, 1, 2, epoch++));
    state.SetItemsProcessed(state.iterations() * 150000);
}
BENCHMARK(BM_PlanEpoch);

} // namespace

BENCHMARK_MAIN();
