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

#include "wtd/rng.hpp"
#include "wtd/tensor.hpp"

namespace wtd {

// ---------------------------------------------------------------------------
// Parameter blocks. Weight layouts keep the output index fastest so the
// innermost accumulation loops run over contiguous memory.
// ---------------------------------------------------------------------------

/// Dense map: y = W^T x + b, weights indexed [in][out].
struct Affine {
    int in = 0;
    int out = 0;
    std::vector<double> w;  // in * out
    std::vector<double> b;  // out

    Affine() = default;
    Affine(int in_dim, int out_dim)
        : in(in_dim), out(out_dim), w(std::size_t(in_dim) * out_dim, 0.0),
          b(out_dim, 0.0) {}
    std::size_t param_count() const { return w.size() + b.size(); }
};

/// 1-D convolution kernel, weights indexed [tap][in][out].
struct Conv1d {
    int kernel = 1;
    int in_ch = 0;
    int out_ch = 0;
    int dilation = 1;
    std::vector<double> w;  // kernel * in_ch * out_ch
    std::vector<double> b;  // out_ch

    Conv1d() = default;
    Conv1d(int k, int cin, int cout, int d)
        : kernel(k), in_ch(cin), out_ch(cout), dilation(d),
          w(std::size_t(k) * cin * cout, 0.0), b(cout, 0.0) {}
    std::size_t param_count() const { return w.size() + b.size(); }
};

// ---------------------------------------------------------------------------
// Receptive-field and length arithmetic for stacked dilated convolutions with
// dilation doubling per layer (d_l = 2^{l-1}).
// ---------------------------------------------------------------------------

/// Inputs visible to one output of layer l in a stack of unpadded dilated
/// convolutions with kernel size K: 1 + (K-1) * (2^l - 1).
long receptive_field(int kernel, int layer);

/// Output length of one unpadded convolution; throws std::invalid_argument
/// naming the required minimum when the input is too short.
int conv_out_len(int in_len, int kernel, int dilation);

// ---------------------------------------------------------------------------
// Forward / backward ops. Backward functions accumulate (+=) into gradient
// buffers shaped like the corresponding inputs/parameters; callers zero them.
// ---------------------------------------------------------------------------

/// y[t,o] = b[o] + sum_{k,c} w[k,c,o] * x[t + k*d, c]; output length
/// L - (K-1)*d. No padding: every tap reads a real sample.
SeqTensor conv1d_forward(const SeqTensor& x, const Conv1d& p);
void conv1d_backward(const SeqTensor& x, const Conv1d& p, const SeqTensor& dy,
                     SeqTensor* dx, Conv1d& grad);

/// y = W^T x + b for a single vector.
void affine_forward(const double* x, const Affine& p, double* y);
/// Accumulates dx (if non-null) and parameter gradients for one vector.
void affine_backward(const double* x, const Affine& p, const double* dy,
                     double* dx, Affine& grad);

/// Applies the same affine cell independently at every time step:
/// x (L, C=p.in) -> y (L, p.out).
SeqTensor time_distributed_affine(const SeqTensor& x, const Affine& p);
void time_distributed_affine_backward(const SeqTensor& x, const Affine& p,
                                      const SeqTensor& dy, SeqTensor* dx,
                                      Affine& grad);

/// Applies the same affine cell independently to every channel's time series:
/// x (L=p.in, C) -> y (p.out, C). Parameters are shared across channels.
SeqTensor channel_distributed(const SeqTensor& x, const Affine& cell);
void channel_distributed_backward(const SeqTensor& x, const Affine& cell,
                                  const SeqTensor& dy, SeqTensor* dx,
                                  Affine& grad);

/// Elementwise tanh(filter) * sigmoid(gate). The cache keeps the two
/// activations so the backward pass avoids re-evaluating transcendentals.
struct GatedCache {
    SeqTensor tf;  // tanh(filter)
    SeqTensor sg;  // sigmoid(gate)
};
SeqTensor gated_activation(const SeqTensor& filter, const SeqTensor& gate,
                           GatedCache* cache = nullptr);
void gated_backward(const GatedCache& cache, const SeqTensor& dy,
                    SeqTensor& dfilter, SeqTensor& dgate);

/// Stride-1 moving average with window (K-1)*d + 1, matching the output
/// length of conv1d_forward for the same (L, K, d).
SeqTensor avg_pool_align(const SeqTensor& x, int kernel, int dilation);
void avg_pool_align_backward(int in_len, int kernel, int dilation,
                             const SeqTensor& dy, SeqTensor& dx);

/// Per-channel dropout factors: 0 with probability p, else 1/(1-p).
/// Masks are drawn separately from application so a training step can
/// pre-draw all masks in a fixed order regardless of evaluation schedule.
std::vector<double> dropout_mask(int channels, double p, Rng& rng);
/// Multiplies every time step of channel c by mask[c].
void apply_channel_mask(SeqTensor& x, const std::vector<double>& mask);
/// Convenience wrapper: identity when !training or p == 0.
SeqTensor spatial_dropout(const SeqTensor& x, double p, Rng* rng,
                          bool training);

inline double leaky_relu(double x, double slope) {
    return x >= 0.0 ? x : slope * x;
}
/// Derivative expressed through the output; valid because slope > 0 keeps
/// sign(y) == sign(x). The kink at 0 takes the right derivative (1).
inline double leaky_relu_grad_from_output(double y, double slope) {
    return y >= 0.0 ? 1.0 : slope;
}
void leaky_relu_inplace(SeqTensor& x, double slope);
/// dx[i] = dy[i] * lrelu'(x[i]), with y the forward output.
void leaky_relu_backward(const SeqTensor& y, double slope, SeqTensor& dy);

}  // namespace wtd
