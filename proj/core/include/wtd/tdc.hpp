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
#include <cstddef>
#include <vector>

#include "wtd/layers.hpp"
#include "wtd/tensor.hpp"

namespace wtd {

/// Months are encoded in 11 dimensions: January..November map to unit
/// vectors e1..e11 and December to the zero vector (dropped category, which
/// avoids perfect collinearity with a bias term).
inline constexpr int kMonthOheDim = 11;

/// month is 1..12. Writes kMonthOheDim values.
void month_one_hot(int month, double* out);

/// Square 2-D convolution kernel, stride 1, valid (no padding). Weights
/// indexed [kr][kc][in][out], output index fastest.
struct Conv2d {
    int kernel = 2;
    int in_ch = 0;
    int out_ch = 0;
    std::vector<double> w;  // kernel * kernel * in_ch * out_ch
    std::vector<double> b;  // out_ch

    Conv2d() = default;
    Conv2d(int k, int cin, int cout)
        : kernel(k), in_ch(cin), out_ch(cout),
          w(std::size_t(k) * k * cin * cout, 0.0), b(cout, 0.0) {}
    std::size_t param_count() const { return w.size() + b.size(); }
};

Frame conv2d_forward(const Frame& x, const Conv2d& p);
void conv2d_backward(const Frame& x, const Conv2d& p, const Frame& dy,
                     Frame* dx, Conv2d& grad);

/// Per-channel maximum over all spatial positions; argmax (flattened
/// row*cols+col) recorded per channel for the backward pass.
void global_max_pool(const Frame& x, double* out, int* argmax);

/// The frame encoder: four stacked 2x2 valid convolutions with leaky-ReLU
/// after each, then a global spatial max pool. Default filter widths
/// (8, 16, 16, 16) on 3 input channels give exactly 2712 parameters.
struct TdcParams {
    std::array<Conv2d, 4> convs;
};

/// Filter progression for the default encoder.
TdcParams make_tdc_params(int in_channels, const std::array<int, 4>& filters);

std::size_t tdc_parameter_count(const TdcParams& p);

/// One model input: T weather frames (layout (t, row, col, channel), channel
/// fastest) plus the calendar month (1..12) of each frame. Non-owning views.
struct WindowInput {
    int steps = 0;
    int rows = 0;
    int cols = 0;
    int channels = 0;
    const double* frames = nullptr;  // steps * rows * cols * channels
    const int* months = nullptr;     // steps

    std::size_t frame_stride() const {
        return std::size_t(rows) * cols * channels;
    }
    const double* frame(int t) const { return frames + t * frame_stride(); }
};

/// Intermediate activations of one encoded window, kept for the backward
/// pass: post-activation output of each conv layer per frame, plus the max
/// pool argmax per output channel.
struct TdcCache {
    std::vector<std::array<Frame, 4>> acts;  // [t][layer]
    std::vector<std::vector<int>> argmax;    // [t][out channel]
};

/// Encodes every frame with the shared conv stack, concatenating the pooled
/// 16-vector with the frame's month encoding: output (T, 16 + 11 = 27).
/// Throws std::invalid_argument when the spatial extent cannot survive the
/// four valid convolutions.
SeqTensor tdc_encode(const WindowInput& in, const TdcParams& p, double slope,
                     TdcCache* cache = nullptr);

/// dh is the gradient w.r.t. tdc_encode's output; columns past the pooled
/// width are calendar constants and are ignored. Accumulates into grad.
void tdc_encode_backward(const WindowInput& in, const TdcParams& p,
                         double slope, const TdcCache& cache,
                         const SeqTensor& dh, TdcParams& grad);

}  // namespace wtd
