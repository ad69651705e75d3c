// ----------------------------------------------------------------------------
// Copyright 2026 The wtdcast Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ----------------------------------------------------------------------------
//
// Single-sample forward and forward+backward timings at the reference input
// shape (104-week window of 8x8x3 frames). One training epoch costs roughly
// n_train times the fwd+bwd figure.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "wtd/rng.hpp"
#include "wtd/seqmods.hpp"
#include "wtd/training.hpp"

using namespace wtd;

namespace {

struct Fixture {
    Model model;
    std::vector<double> frames;
    std::vector<int> months;

    explicit Fixture(ModelKind kind) : model(build_model(make_default_config(kind))) {
        init_parameters(model, 1);
        const ModelConfig& c = model.config;
        frames.resize(std::size_t(c.t_window) * c.rows * c.cols * c.channels);
        Rng rng(2);
        for (double& v : frames) v = rng.uniform(-1.0, 1.0);
        months.resize(std::size_t(c.t_window));
        for (int t = 0; t < c.t_window; ++t) months[std::size_t(t)] = 1 + t % 12;
    }

    WindowInput input() const {
        return WindowInput{model.config.t_window, model.config.rows,
                           model.config.cols,     model.config.channels,
                           frames.data(),         months.data()};
    }
};

void BM_Forward(benchmark::State& state, ModelKind kind) {
    const Fixture fx(kind);
    const WindowInput in = fx.input();
    for (auto _ : state) {
        benchmark::DoNotOptimize(model_forward(fx.model, in, nullptr, nullptr));
    }
}

void BM_ForwardBackward(benchmark::State& state, ModelKind kind) {
    const Fixture fx(kind);
    const WindowInput in = fx.input();
    ModelParams grads = make_params(fx.model.config);
    for (auto _ : state) {
        ModelCache cache;
        benchmark::DoNotOptimize(model_forward(fx.model, in, nullptr, &cache));
        model_backward(fx.model, in, cache, 1.0, grads);
        benchmark::DoNotOptimize(grads);
    }
}

BENCHMARK_CAPTURE(BM_Forward, tdc_lstm, ModelKind::TdcLstm);
BENCHMARK_CAPTURE(BM_Forward, tdc_unpwavenet, ModelKind::TdcUnpWaveNet);
BENCHMARK_CAPTURE(BM_ForwardBackward, tdc_lstm, ModelKind::TdcLstm);
BENCHMARK_CAPTURE(BM_ForwardBackward, tdc_unpwavenet, ModelKind::TdcUnpWaveNet);

}  // namespace

BENCHMARK_MAIN();
