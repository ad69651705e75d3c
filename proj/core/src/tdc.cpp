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

#include "wtd/tdc.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace wtd {

void month_one_hot(int month, double* out) {
    if (month < 1 || month > 12) {
        throw std::invalid_argument("month_one_hot: month must be 1..12, got " +
                                    std::to_string(month));
    }
    for (int i = 0; i < kMonthOheDim; ++i) out[i] = 0.0;
    if (month <= kMonthOheDim) out[month - 1] = 1.0;
}

Frame conv2d_forward(const Frame& x, const Conv2d& p) {
    if (x.channels != p.in_ch) {
        throw std::invalid_argument("conv2d_forward: channel mismatch");
    }
    if (x.rows < p.kernel || x.cols < p.kernel) {
        throw std::invalid_argument(
            "conv2d_forward: input " + std::to_string(x.rows) + "x" +
            std::to_string(x.cols) + " smaller than kernel " +
            std::to_string(p.kernel));
    }
    const int out_rows = x.rows - p.kernel + 1;
    const int out_cols = x.cols - p.kernel + 1;
    Frame y(out_rows, out_cols, p.out_ch);
    for (int r = 0; r < out_rows; ++r) {
        for (int c = 0; c < out_cols; ++c) {
            double* yo = y.at(r, c);
            for (int o = 0; o < p.out_ch; ++o) yo[o] = p.b[o];
            for (int kr = 0; kr < p.kernel; ++kr) {
                for (int kc = 0; kc < p.kernel; ++kc) {
                    const double* xi = x.at(r + kr, c + kc);
                    const double* wk =
                        p.w.data() +
                        (std::size_t(kr) * p.kernel + kc) * p.in_ch * p.out_ch;
                    for (int i = 0; i < p.in_ch; ++i) {
                        const double xv = xi[i];
                        const double* wi = wk + std::size_t(i) * p.out_ch;
                        for (int o = 0; o < p.out_ch; ++o) yo[o] += wi[o] * xv;
                    }
                }
            }
        }
    }
    return y;
}

void conv2d_backward(const Frame& x, const Conv2d& p, const Frame& dy,
                     Frame* dx, Conv2d& grad) {
    for (int r = 0; r < dy.rows; ++r) {
        for (int c = 0; c < dy.cols; ++c) {
            const double* dyo = dy.at(r, c);
            for (int o = 0; o < p.out_ch; ++o) grad.b[o] += dyo[o];
            for (int kr = 0; kr < p.kernel; ++kr) {
                for (int kc = 0; kc < p.kernel; ++kc) {
                    const double* xi = x.at(r + kr, c + kc);
                    const std::size_t off =
                        (std::size_t(kr) * p.kernel + kc) * p.in_ch * p.out_ch;
                    const double* wk = p.w.data() + off;
                    double* gk = grad.w.data() + off;
                    double* dxi = dx ? dx->at(r + kr, c + kc) : nullptr;
                    for (int i = 0; i < p.in_ch; ++i) {
                        const double xv = xi[i];
                        const double* wi = wk + std::size_t(i) * p.out_ch;
                        double* gi = gk + std::size_t(i) * p.out_ch;
                        double acc = 0.0;
                        for (int o = 0; o < p.out_ch; ++o) {
                            const double d = dyo[o];
                            gi[o] += d * xv;
                            acc += d * wi[o];
                        }
                        if (dxi) dxi[i] += acc;
                    }
                }
            }
        }
    }
}

void global_max_pool(const Frame& x, double* out, int* argmax) {
    for (int ch = 0; ch < x.channels; ++ch) {
        out[ch] = x.at(0, 0, ch);
        argmax[ch] = 0;
    }
    for (int r = 0; r < x.rows; ++r) {
        for (int c = 0; c < x.cols; ++c) {
            const double* xv = x.at(r, c);
            const int flat = r * x.cols + c;
            for (int ch = 0; ch < x.channels; ++ch) {
                if (xv[ch] > out[ch]) {
                    out[ch] = xv[ch];
                    argmax[ch] = flat;
                }
            }
        }
    }
}

TdcParams make_tdc_params(int in_channels, const std::array<int, 4>& filters) {
    TdcParams p;
    int cin = in_channels;
    for (int l = 0; l < 4; ++l) {
        p.convs[l] = Conv2d(2, cin, filters[l]);
        cin = filters[l];
    }
    return p;
}

std::size_t tdc_parameter_count(const TdcParams& p) {
    std::size_t n = 0;
    for (const Conv2d& c : p.convs) n += c.param_count();
    return n;
}

SeqTensor tdc_encode(const WindowInput& in, const TdcParams& p, double slope,
                     TdcCache* cache) {
    const int n_layers = int(p.convs.size());
    const int min_side = n_layers + 1;  // each 2x2 valid conv removes one cell
    if (in.rows < min_side || in.cols < min_side) {
        throw std::invalid_argument(
            "tdc_encode: frames must be at least " + std::to_string(min_side) +
            "x" + std::to_string(min_side) + ", got " +
            std::to_string(in.rows) + "x" + std::to_string(in.cols));
    }
    const int pooled = p.convs.back().out_ch;
    SeqTensor h(in.steps, pooled + kMonthOheDim);
    if (cache) {
        cache->acts.assign(in.steps, {});
        cache->argmax.assign(in.steps, std::vector<int>(pooled, 0));
    }
    Frame frame(in.rows, in.cols, in.channels);
    for (int t = 0; t < in.steps; ++t) {
        std::copy(in.frame(t), in.frame(t) + frame.data.size(),
                  frame.data.begin());
        const Frame* cur = &frame;
        std::array<Frame, 4> acts;
        for (int l = 0; l < n_layers; ++l) {
            acts[l] = conv2d_forward(*cur, p.convs[l]);
            for (double& v : acts[l].data) v = leaky_relu(v, slope);
            cur = &acts[l];
        }
        double* row = h.at(t);
        std::vector<int> argmax(pooled);
        global_max_pool(*cur, row, argmax.data());
        month_one_hot(in.months[t], row + pooled);
        if (cache) {
            cache->acts[t] = std::move(acts);
            cache->argmax[t] = std::move(argmax);
        }
    }
    return h;
}

void tdc_encode_backward(const WindowInput& in, const TdcParams& p,
                         double slope, const TdcCache& cache,
                         const SeqTensor& dh, TdcParams& grad) {
    const int n_layers = int(p.convs.size());
    const int pooled = p.convs.back().out_ch;
    Frame frame(in.rows, in.cols, in.channels);
    for (int t = 0; t < in.steps; ++t) {
        const std::array<Frame, 4>& acts = cache.acts[t];
        const double* dht = dh.at(t);

        // Scatter pooled gradients to the recorded argmax positions.
        Frame dtop(acts[n_layers - 1].rows, acts[n_layers - 1].cols, pooled);
        for (int ch = 0; ch < pooled; ++ch) {
            dtop.data[std::size_t(cache.argmax[t][ch]) * pooled + ch] = dht[ch];
        }

        std::copy(in.frame(t), in.frame(t) + frame.data.size(),
                  frame.data.begin());
        Frame dcur = std::move(dtop);
        for (int l = n_layers - 1; l >= 0; --l) {
            const Frame& y = acts[l];
            for (std::size_t i = 0; i < dcur.data.size(); ++i) {
                dcur.data[i] *= leaky_relu_grad_from_output(y.data[i], slope);
            }
            const Frame& input = (l == 0) ? frame : acts[l - 1];
            if (l == 0) {
                conv2d_backward(input, p.convs[l], dcur, nullptr, grad.convs[l]);
            } else {
                Frame dprev(input.rows, input.cols, input.channels);
                conv2d_backward(input, p.convs[l], dcur, &dprev, grad.convs[l]);
                dcur = std::move(dprev);
            }
        }
    }
}

}  // namespace wtd
