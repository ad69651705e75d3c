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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wtd/layers.hpp"
#include "wtd/tdc.hpp"
#include "wtd/tensor.hpp"

namespace wtd {

enum class ModelKind { TdcLstm, TdcUnpWaveNet };

/// "tdc-lstm" / "tdc-unpwavenet".
std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

/// Architecture hyper-parameters. The defaults reproduce the two reference
/// configurations whose exact totals (9705 / 17915) act as a drift tripwire.
struct ModelConfig {
    ModelKind kind = ModelKind::TdcLstm;
    int t_window = 104;
    int rows = 8;
    int cols = 8;
    int channels = 3;
    std::array<int, 4> tdc_filters{8, 16, 16, 16};
    double leaky_slope = 0.3;
    double dropout_p = 0.15;
    int bottleneck_dim = 16;
    // LSTM head.
    int lstm_units = 32;
    int dense_dim = 8;
    // UnPWaveNet head.
    int unp_layers = 5;
    int unp_filters = 32;
    int unp_kernel = 4;
    int unp_res_channels = 8;
    int cd_out_len = 1;
    /// When set, build_model fails hard unless the assembled parameter count
    /// matches exactly.
    std::optional<std::size_t> expected_param_total;
};

/// Default configuration for a kind, with the total-count tripwire armed.
ModelConfig make_default_config(ModelKind kind);

/// Single-layer LSTM with a combined gate matrix: rows are [input; hidden],
/// columns are the four gates in order (input, forget, candidate, output),
/// each `units` wide. Gates use sigmoid; candidate and output activations
/// use leaky-ReLU in place of tanh.
struct Lstm {
    int in = 0;
    int units = 0;
    std::vector<double> w;  // (in + units) * 4*units
    std::vector<double> b;  // 4*units

    Lstm() = default;
    Lstm(int in_dim, int n_units)
        : in(in_dim), units(n_units),
          w(std::size_t(in_dim + n_units) * 4 * n_units, 0.0),
          b(std::size_t(4) * n_units, 0.0) {}
    std::size_t param_count() const { return w.size() + b.size(); }
};

/// Post-activation gate values and states per step, kept for BPTT.
struct LstmCache {
    SeqTensor gates;  // (T, 4*units): i, f, g, o
    SeqTensor c;      // (T, units)
    SeqTensor h;      // (T, units)
};

/// Runs the recurrence from zero initial state; writes the final hidden
/// state (units values) to h_final.
void lstm_forward(const SeqTensor& x, const Lstm& p, double slope,
                  double* h_final, LstmCache* cache);
/// Backpropagates from a gradient on the final hidden state only (the model
/// reads just the last step). Accumulates dx and parameter gradients.
void lstm_backward(const SeqTensor& x, const Lstm& p, double slope,
                   const LstmCache& cache, const double* dh_final,
                   SeqTensor* dx, Lstm& grad);

struct LstmHeadParams {
    Affine bottleneck;  // 27 -> 16, applied per time step
    Lstm lstm;          // 16 -> 32
    Affine dense;       // 32 -> 8
    Affine out;         // 8 -> 1
};

struct UnpLayerParams {
    Conv1d filter;                  // dilated, kernel 4, 32 filters
    Conv1d gate;                    // same shape as filter
    Conv1d proj;                    // 1x1, 32 -> 8; feeds skip AND residual
    std::optional<Conv1d> res_proj; // 1x1, 16 -> 8; first layer only
    Affine cd;                      // stream length -> 1, shared by channels
};

struct UnpHeadParams {
    Conv1d bottleneck;  // 1x1, 27 -> 16
    std::vector<UnpLayerParams> layers;
    Conv1d skip_out;    // 1x1, 8*n_layers -> 8
    Affine out;         // 8 -> 1
};

struct ModelParams {
    TdcParams tdc;
    std::optional<LstmHeadParams> lstm;
    std::optional<UnpHeadParams> unp;
};

struct Model {
    ModelConfig config;
    ModelParams params;
};

/// Named view of every parameter block, in a fixed canonical order shared by
/// the optimizer, initializer, checkpoints, and parameter accounting. Weight
/// blocks end in ".w", bias blocks in ".b".
struct NamedBlock {
    std::string name;
    std::vector<double>* data;
};
struct ConstNamedBlock {
    std::string name;
    const std::vector<double>* data;
};
std::vector<NamedBlock> param_blocks(ModelParams& p);
std::vector<ConstNamedBlock> param_blocks(const ModelParams& p);

inline bool is_weight_block(const std::string& name) {
    return name.size() >= 2 && name.compare(name.size() - 2, 2, ".w") == 0;
}

std::size_t count_parameters(const ModelParams& p);
/// Block name -> scalar count, canonical order.
std::vector<std::pair<std::string, std::size_t>> parameter_breakdown(
    const ModelParams& p);

/// Assembles zero-valued parameters shaped by the config and verifies the
/// expected total when armed. Randomization is a separate step
/// (init_parameters in the training module) so structure and initialization
/// stay independently testable.
Model build_model(const ModelConfig& config);

/// Zero-valued parameter set shaped like the config (gradient buffers,
/// momentum state).
ModelParams make_params(const ModelConfig& config);

// ---------------------------------------------------------------------------
// Forward / backward.
// ---------------------------------------------------------------------------

struct LstmHeadCache {
    SeqTensor bott;   // post-activation bottleneck output, pre-dropout
    SeqTensor x;      // post-dropout LSTM input
    LstmCache lstm;
    std::vector<double> dense_out;  // post-activation
};

struct UnpLayerCache {
    SeqTensor x;       // layer input
    GatedCache gated_cache;
    SeqTensor gated;   // gated activation output
    SeqTensor s;       // 1x1 projection output (skip and residual source)
    SeqTensor pooled;  // avg-pool-aligned input (residual base)
};

struct UnpHeadCache {
    SeqTensor bott;    // post-activation bottleneck output, pre-dropout
    std::vector<UnpLayerCache> layers;
    std::vector<double> skip_concat;  // 8*n_layers
    std::vector<double> head8;        // final 1x1 output
};

struct ModelCache {
    TdcCache tdc;
    SeqTensor h;  // (T, 27) encoder output
    std::vector<double> dropout_mask;
    LstmHeadCache lstm;
    UnpHeadCache unp;
};

/// Evaluates the model on one window. dropout_mask is the per-channel factor
/// vector (bottleneck_dim entries, values 0 or 1/(1-p)); pass nullptr for
/// inference (dropout disabled). Pre-drawing masks keeps a training step's
/// random stream independent of sample evaluation order.
double model_forward(const Model& m, const WindowInput& in,
                     const std::vector<double>* drop_mask,
                     ModelCache* cache = nullptr);

/// Inference-mode convenience wrapper.
double model_predict(const Model& m, const WindowInput& in);

/// Accumulates d(output*dout)/d(params) into grads, which must be shaped
/// like m.params (see make_params).
void model_backward(const Model& m, const WindowInput& in,
                    const ModelCache& cache, double dout, ModelParams& grads);

// ---------------------------------------------------------------------------
// Checkpoints: versioned JSON container, round-trip exact.
// ---------------------------------------------------------------------------

void save_checkpoint(const Model& m, const std::string& path);
Model load_checkpoint(const std::string& path);

}  // namespace wtd
