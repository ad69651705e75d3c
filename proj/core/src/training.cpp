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

#include "wtd/training.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <thread>

#include "wtd/rng.hpp"

namespace wtd {

namespace {

// Separates the training stream (shuffle, dropout) from the initialization
// stream so both are individually reproducible from the member seed.
constexpr std::uint64_t kTrainStreamSalt = 0xD1B54A32D192ED03ULL;

void init_uniform(std::vector<double>& w, int fan_in, Rng& rng) {
    const double limit = std::sqrt(3.0 / fan_in);
    for (double& v : w) v = rng.uniform(-limit, limit);
}

void init_affine(Affine& a, Rng& rng) {
    init_uniform(a.w, a.in, rng);
    std::fill(a.b.begin(), a.b.end(), 0.0);
}

void init_conv1d(Conv1d& c, Rng& rng) {
    init_uniform(c.w, c.kernel * c.in_ch, rng);
    std::fill(c.b.begin(), c.b.end(), 0.0);
}

void init_conv2d(Conv2d& c, Rng& rng) {
    init_uniform(c.w, c.kernel * c.kernel * c.in_ch, rng);
    std::fill(c.b.begin(), c.b.end(), 0.0);
}

void init_lstm(Lstm& l, Rng& rng) {
    init_uniform(l.w, l.in + l.units, rng);
    std::fill(l.b.begin(), l.b.end(), 0.0);
    // Forget gate starts open so early gradients reach back in time.
    std::fill(l.b.begin() + l.units, l.b.begin() + 2 * l.units, 1.0);
}

}  // namespace

void init_parameters(Model& m, std::uint64_t seed) {
    Rng rng(seed);
    for (Conv2d& c : m.params.tdc.convs) init_conv2d(c, rng);
    if (m.params.lstm) {
        LstmHeadParams& h = *m.params.lstm;
        init_affine(h.bottleneck, rng);
        init_lstm(h.lstm, rng);
        init_affine(h.dense, rng);
        init_affine(h.out, rng);
    }
    if (m.params.unp) {
        UnpHeadParams& h = *m.params.unp;
        init_conv1d(h.bottleneck, rng);
        for (UnpLayerParams& lp : h.layers) {
            init_conv1d(lp.filter, rng);
            init_conv1d(lp.gate, rng);
            init_conv1d(lp.proj, rng);
            if (lp.res_proj) init_conv1d(*lp.res_proj, rng);
            init_affine(lp.cd, rng);
        }
        init_conv1d(h.skip_out, rng);
        init_affine(h.out, rng);
    }
}

double dataset_mse(const Model& m, const WindowedDataset& data, SplitSet set) {
    double sum = 0.0;
    long n = 0;
    for (const Sample& s : data.samples) {
        if (s.set != set) continue;
        const double err = model_predict(m, data.input(s)) - s.target_z;
        sum += err * err;
        ++n;
    }
    if (n == 0) {
        throw std::invalid_argument("dataset_mse: split holds no samples");
    }
    return sum / double(n);
}

TrainHistory train_local_model(const WindowedDataset& data, Model& m,
                               const TrainConfig& cfg, std::uint64_t seed) {
    // lr == 0 is a permitted degenerate case (a no-op optimizer); only a
    // negative rate is meaningless.
    if (cfg.epochs < 1 || cfg.learning_rate < 0.0 || cfg.clipnorm <= 0.0 ||
        cfg.batch_size < 1) {
        throw std::invalid_argument("train_local_model: invalid TrainConfig");
    }
    std::vector<int> train_idx;
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
        if (data.samples[i].set == SplitSet::Train) train_idx.push_back(int(i));
    }
    if (train_idx.empty()) {
        throw std::invalid_argument("train_local_model: empty train split");
    }
    m.config.dropout_p = cfg.dropout;

    Rng rng(seed ^ kTrainStreamSalt);
    ModelParams grads = make_params(m.config);
    ModelParams velocity = make_params(m.config);
    auto grad_blocks = param_blocks(grads);
    auto vel_blocks = param_blocks(velocity);
    auto w_blocks = param_blocks(m.params);

    TrainHistory hist;
    hist.initial_train_mse = dataset_mse(m, data, SplitSet::Train);
    const bool has_val = !data.set_samples(SplitSet::Val).empty();

    std::vector<std::vector<double>> masks;
    ModelCache cache;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(train_idx);
        double epoch_sq_err = 0.0;
        for (std::size_t batch_start = 0; batch_start < train_idx.size();
             batch_start += cfg.batch_size) {
            const std::size_t batch_end = std::min(
                batch_start + cfg.batch_size, train_idx.size());
            const int bn = int(batch_end - batch_start);

            // Masks are drawn up front, in sample order, so the random
            // stream does not depend on how the batch gets evaluated.
            masks.assign(bn, {});
            if (cfg.dropout > 0.0) {
                for (int k = 0; k < bn; ++k) {
                    masks[k] =
                        dropout_mask(m.config.bottleneck_dim, cfg.dropout, rng);
                }
            }

            for (auto& b : grad_blocks) {
                std::fill(b.data->begin(), b.data->end(), 0.0);
            }
            double batch_sq_err = 0.0;
            for (int k = 0; k < bn; ++k) {
                const Sample& s = data.samples[train_idx[batch_start + k]];
                const WindowInput in = data.input(s);
                const std::vector<double>* mask =
                    cfg.dropout > 0.0 ? &masks[k] : nullptr;
                const double pred = model_forward(m, in, mask, &cache);
                const double err = pred - s.target_z;
                batch_sq_err += err * err;
                model_backward(m, in, cache, 2.0 * err / bn, grads);
            }
            epoch_sq_err += batch_sq_err;
            if (!std::isfinite(batch_sq_err)) {
                throw std::runtime_error(
                    "train_local_model: non-finite loss at epoch " +
                    std::to_string(epoch + 1) + ", batch " +
                    std::to_string(batch_start / cfg.batch_size + 1));
            }

            // L2 pulls on weights only, and is part of the clipped gradient.
            if (cfg.l2 > 0.0) {
                for (std::size_t bi = 0; bi < grad_blocks.size(); ++bi) {
                    if (!is_weight_block(grad_blocks[bi].name)) continue;
                    const std::vector<double>& w = *w_blocks[bi].data;
                    std::vector<double>& g = *grad_blocks[bi].data;
                    for (std::size_t i = 0; i < g.size(); ++i) {
                        g[i] += 2.0 * cfg.l2 * w[i];
                    }
                }
            }

            double sq_norm = 0.0;
            for (const auto& b : grad_blocks) {
                for (double g : *b.data) sq_norm += g * g;
            }
            const double norm = std::sqrt(sq_norm);
            const double scale = norm > cfg.clipnorm ? cfg.clipnorm / norm : 1.0;

            // Nesterov: v <- mu*v - lr*g; w <- w + mu*v - lr*g.
            const double lr = cfg.learning_rate;
            const double mu = cfg.momentum;
            for (std::size_t bi = 0; bi < grad_blocks.size(); ++bi) {
                std::vector<double>& w = *w_blocks[bi].data;
                std::vector<double>& v = *vel_blocks[bi].data;
                const std::vector<double>& g = *grad_blocks[bi].data;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    const double gi = g[i] * scale;
                    v[i] = mu * v[i] - lr * gi;
                    w[i] += mu * v[i] - lr * gi;
                }
            }
        }
        hist.train_mse.push_back(epoch_sq_err / double(train_idx.size()));
        if (has_val) {
            hist.val_mse.push_back(dataset_mse(m, data, SplitSet::Val));
        }
    }
    hist.final_train_mse = dataset_mse(m, data, SplitSet::Train);
    return hist;
}

Ensemble train_ensemble(const WindowedDataset& data, const ModelConfig& config,
                        const TrainConfig& cfg) {
    std::vector<std::uint64_t> seeds = cfg.seeds;
    if (seeds.empty()) {
        for (int k = 0; k < cfg.ensemble_size; ++k) {
            seeds.push_back(cfg.base_seed + std::uint64_t(k));
        }
    }
    if (seeds.empty()) {
        throw std::invalid_argument("train_ensemble: no member seeds");
    }
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() !=
        seeds.size()) {
        throw std::invalid_argument("train_ensemble: member seeds must be distinct");
    }

    Ensemble ens;
    ens.members.resize(seeds.size());
    std::vector<std::string> errors(seeds.size());

    auto run_member = [&](std::size_t k) {
        try {
            EnsembleMember& mem = ens.members[k];
            mem.seed = seeds[k];
            mem.model = build_model(config);
            init_parameters(mem.model, mem.seed);
            mem.history = train_local_model(data, mem.model, cfg, mem.seed);
        } catch (const std::exception& e) {
            errors[k] = e.what();
        }
    };

    const int n_threads = std::max(1, cfg.threads);
    if (n_threads == 1) {
        for (std::size_t k = 0; k < seeds.size(); ++k) run_member(k);
    } else {
        std::size_t next = 0;
        while (next < seeds.size()) {
            std::vector<std::thread> pool;
            const std::size_t stop =
                std::min(next + std::size_t(n_threads), seeds.size());
            for (std::size_t k = next; k < stop; ++k) {
                pool.emplace_back(run_member, k);
            }
            for (auto& t : pool) t.join();
            next = stop;
        }
    }
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        if (!errors[k].empty()) {
            throw std::runtime_error("train_ensemble: member with seed " +
                                     std::to_string(seeds[k]) + " failed: " +
                                     errors[k]);
        }
    }
    return ens;
}

PredictionSeries ensemble_predict(const Ensemble& ens,
                                  const WindowedDataset& data, SplitSet set) {
    if (ens.members.empty()) {
        throw std::invalid_argument("ensemble_predict: empty ensemble");
    }
    PredictionSeries out;
    for (const Sample& s : data.samples) {
        if (s.set != set) continue;
        const WindowInput in = data.input(s);
        double sum = 0.0, sumsq = 0.0;
        for (const EnsembleMember& mem : ens.members) {
            const double y =
                data.stats.denormalize_target(model_predict(mem.model, in));
            sum += y;
            sumsq += y * y;
        }
        const double n = double(ens.members.size());
        const double mean = sum / n;
        const double var = std::max(0.0, sumsq / n - mean * mean);
        out.dates.push_back(s.date);
        out.mean.push_back(mean);
        out.stddev.push_back(std::sqrt(var));
    }
    if (out.dates.empty()) {
        throw std::invalid_argument("ensemble_predict: split holds no samples");
    }
    return out;
}

std::vector<double> set_targets_m(const WindowedDataset& data, SplitSet set) {
    std::vector<double> out;
    for (const Sample& s : data.samples) {
        if (s.set == set) out.push_back(s.target_raw);
    }
    return out;
}

}  // namespace wtd
