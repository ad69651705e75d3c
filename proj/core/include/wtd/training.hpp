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

#pragma once

#include <cstdint>
#include <vector>

#include "wtd/dataio.hpp"
#include "wtd/preprocess.hpp"
#include "wtd/seqmods.hpp"

namespace wtd {

struct TrainConfig {
    double learning_rate = 0.002;
    double l2 = 0.0005;       // coefficient of l2 * sum(w^2) over weights
    double momentum = 0.9;    // Nesterov
    int epochs = 80;
    int batch_size = 8;
    double clipnorm = 1.0;    // global gradient-norm ceiling, per batch
    double dropout = 0.15;
    int ensemble_size = 10;
    std::uint64_t base_seed = 1;
    /// Explicit member seeds; when empty, member k uses base_seed + k.
    std::vector<std::uint64_t> seeds;
    /// Ensemble members run concurrently on up to this many threads. Results
    /// are independent of the thread count (members share nothing mutable).
    int threads = 1;
};

struct TrainHistory {
    std::vector<double> train_mse;  // per epoch, training-mode batch average
    std::vector<double> val_mse;    // per epoch, inference mode
    double initial_train_mse = 0.0; // inference mode, before any update
    double final_train_mse = 0.0;   // inference mode, after the last epoch
};

struct EnsembleMember {
    Model model;
    TrainHistory history;
    std::uint64_t seed = 0;
};

struct Ensemble {
    std::vector<EnsembleMember> members;
};

/// Fills the model with its starting point: every weight drawn uniformly on
/// [-sqrt(3/fan_in), sqrt(3/fan_in)] (std 1/sqrt(fan_in)), every bias zero
/// except the LSTM forget-gate block, which starts at 1. Deterministic given
/// the seed; blocks are drawn in canonical order.
void init_parameters(Model& m, std::uint64_t seed);

/// Mean squared error on normalized targets over one split, inference mode.
double dataset_mse(const Model& m, const WindowedDataset& data, SplitSet set);

/// Minibatch SGD with Nesterov momentum on MSE + L2 (weights only), with
/// per-batch global gradient-norm clipping. Shuffles per epoch and draws
/// dropout masks from a stream derived from the seed; the model's dropout
/// probability is taken from cfg.dropout. Trains in place and reports the
/// loss history. Throws (naming epoch and batch) if the loss goes
/// non-finite.
TrainHistory train_local_model(const WindowedDataset& data, Model& m,
                               const TrainConfig& cfg, std::uint64_t seed);

/// Independent build + init + train per member (see TrainConfig::seeds).
/// Member results are identical whether run serially or concurrently.
Ensemble train_ensemble(const WindowedDataset& data, const ModelConfig& config,
                        const TrainConfig& cfg);

/// Per prediction date of the split: mean and population std across members
/// of the denormalized (meters) outputs.
PredictionSeries ensemble_predict(const Ensemble& ens,
                                  const WindowedDataset& data, SplitSet set);

/// Observed targets (meters) of a split, in date order — the counterpart of
/// ensemble_predict's rows.
std::vector<double> set_targets_m(const WindowedDataset& data, SplitSet set);

}  // namespace wtd
