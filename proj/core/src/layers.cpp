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

#include "wtd/layers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wtd {

long receptive_field(int kernel, int layer) {
    if (kernel < 1 || layer < 1) {
        throw std::invalid_argument("receptive_field: kernel and layer must be >= 1");
    }
    // sum_{i=1..l} 2^{i-1} = 2^l - 1
    return 1 + long(kernel - 1) * ((1L << layer) - 1);
}

int conv_out_len(int in_len, int kernel, int dilation) {
    const int span = (kernel - 1) * dilation;
    if (in_len <= span) {
        throw std::invalid_argument(
            "conv_out_len: input length " + std::to_string(in_len) +
            " too short; need at least " + std::to_string(span + 1) +
            " for kernel " + std::to_string(kernel) + ", dilation " +
            std::to_string(dilation));
    }
    return in_len - span;
}

SeqTensor conv1d_forward(const SeqTensor& x, const Conv1d& p) {
    if (x.channels != p.in_ch) {
        throw std::invalid_argument("conv1d_forward: channel mismatch");
    }
    const int out_len = conv_out_len(x.steps, p.kernel, p.dilation);
    SeqTensor y(out_len, p.out_ch);
    for (int t = 0; t < out_len; ++t) {
        double* yt = y.at(t);
        for (int o = 0; o < p.out_ch; ++o) yt[o] = p.b[o];
        for (int k = 0; k < p.kernel; ++k) {
            const double* xt = x.at(t + k * p.dilation);
            const double* wk = p.w.data() + std::size_t(k) * p.in_ch * p.out_ch;
            for (int c = 0; c < p.in_ch; ++c) {
                const double xv = xt[c];
                const double* wc = wk + std::size_t(c) * p.out_ch;
                for (int o = 0; o < p.out_ch; ++o) yt[o] += wc[o] * xv;
            }
        }
    }
    return y;
}

void conv1d_backward(const SeqTensor& x, const Conv1d& p, const SeqTensor& dy,
                     SeqTensor* dx, Conv1d& grad) {
    const int out_len = dy.steps;
    for (int t = 0; t < out_len; ++t) {
        const double* dyt = dy.at(t);
        for (int o = 0; o < p.out_ch; ++o) grad.b[o] += dyt[o];
        for (int k = 0; k < p.kernel; ++k) {
            const double* xt = x.at(t + k * p.dilation);
            const double* wk = p.w.data() + std::size_t(k) * p.in_ch * p.out_ch;
            double* gk = grad.w.data() + std::size_t(k) * p.in_ch * p.out_ch;
            double* dxt = dx ? dx->at(t + k * p.dilation) : nullptr;
            for (int c = 0; c < p.in_ch; ++c) {
                const double xv = xt[c];
                const double* wc = wk + std::size_t(c) * p.out_ch;
                double* gc = gk + std::size_t(c) * p.out_ch;
                double acc = 0.0;
                for (int o = 0; o < p.out_ch; ++o) {
                    const double d = dyt[o];
                    gc[o] += d * xv;
                    acc += d * wc[o];
                }
                if (dxt) dxt[c] += acc;
            }
        }
    }
}

void affine_forward(const double* x, const Affine& p, double* y) {
    for (int o = 0; o < p.out; ++o) y[o] = p.b[o];
    for (int i = 0; i < p.in; ++i) {
        const double xv = x[i];
        const double* wi = p.w.data() + std::size_t(i) * p.out;
        for (int o = 0; o < p.out; ++o) y[o] += wi[o] * xv;
    }
}

void affine_backward(const double* x, const Affine& p, const double* dy,
                     double* dx, Affine& grad) {
    for (int o = 0; o < p.out; ++o) grad.b[o] += dy[o];
    for (int i = 0; i < p.in; ++i) {
        const double xv = x[i];
        const double* wi = p.w.data() + std::size_t(i) * p.out;
        double* gi = grad.w.data() + std::size_t(i) * p.out;
        double acc = 0.0;
        for (int o = 0; o < p.out; ++o) {
            const double d = dy[o];
            gi[o] += d * xv;
            acc += d * wi[o];
        }
        if (dx) dx[i] += acc;
    }
}

SeqTensor time_distributed_affine(const SeqTensor& x, const Affine& p) {
    if (x.channels != p.in) {
        throw std::invalid_argument("time_distributed_affine: channel mismatch");
    }
    SeqTensor y(x.steps, p.out);
    for (int t = 0; t < x.steps; ++t) affine_forward(x.at(t), p, y.at(t));
    return y;
}

void time_distributed_affine_backward(const SeqTensor& x, const Affine& p,
                                      const SeqTensor& dy, SeqTensor* dx,
                                      Affine& grad) {
    for (int t = 0; t < x.steps; ++t) {
        affine_backward(x.at(t), p, dy.at(t), dx ? dx->at(t) : nullptr, grad);
    }
}

SeqTensor channel_distributed(const SeqTensor& x, const Affine& cell) {
    if (x.steps != cell.in) {
        throw std::invalid_argument(
            "channel_distributed: cell expects input length " +
            std::to_string(cell.in) + ", got " + std::to_string(x.steps));
    }
    SeqTensor y(cell.out, x.channels);
    for (int o = 0; o < cell.out; ++o) {
        double* yo = y.at(o);
        for (int c = 0; c < x.channels; ++c) yo[c] = cell.b[o];
    }
    // Accumulate over time; channel index stays fastest on both sides.
    for (int t = 0; t < x.steps; ++t) {
        const double* xt = x.at(t);
        const double* wt = cell.w.data() + std::size_t(t) * cell.out;
        for (int o = 0; o < cell.out; ++o) {
            const double wv = wt[o];
            double* yo = y.at(o);
            for (int c = 0; c < x.channels; ++c) yo[c] += wv * xt[c];
        }
    }
    return y;
}

void channel_distributed_backward(const SeqTensor& x, const Affine& cell,
                                  const SeqTensor& dy, SeqTensor* dx,
                                  Affine& grad) {
    const int C = x.channels;
    for (int o = 0; o < cell.out; ++o) {
        const double* dyo = dy.at(o);
        double acc = 0.0;
        for (int c = 0; c < C; ++c) acc += dyo[c];
        grad.b[o] += acc;
    }
    for (int t = 0; t < x.steps; ++t) {
        const double* xt = x.at(t);
        const double* wt = cell.w.data() + std::size_t(t) * cell.out;
        double* gt = grad.w.data() + std::size_t(t) * cell.out;
        double* dxt = dx ? dx->at(t) : nullptr;
        for (int o = 0; o < cell.out; ++o) {
            const double* dyo = dy.at(o);
            double gw = 0.0;
            for (int c = 0; c < C; ++c) gw += dyo[c] * xt[c];
            gt[o] += gw;
            if (dxt) {
                const double wv = wt[o];
                for (int c = 0; c < C; ++c) dxt[c] += wv * dyo[c];
            }
        }
    }
}

SeqTensor gated_activation(const SeqTensor& filter, const SeqTensor& gate,
                           GatedCache* cache) {
    if (filter.steps != gate.steps || filter.channels != gate.channels) {
        throw std::invalid_argument("gated_activation: shape mismatch");
    }
    SeqTensor y(filter.steps, filter.channels);
    SeqTensor tf(filter.steps, filter.channels);
    SeqTensor sg(filter.steps, filter.channels);
    const std::size_t n = y.data.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double t = std::tanh(filter.data[i]);
        const double s = 1.0 / (1.0 + std::exp(-gate.data[i]));
        tf.data[i] = t;
        sg.data[i] = s;
        y.data[i] = t * s;
    }
    if (cache) {
        cache->tf = std::move(tf);
        cache->sg = std::move(sg);
    }
    return y;
}

void gated_backward(const GatedCache& cache, const SeqTensor& dy,
                    SeqTensor& dfilter, SeqTensor& dgate) {
    const std::size_t n = dy.data.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double t = cache.tf.data[i];
        const double s = cache.sg.data[i];
        const double d = dy.data[i];
        dfilter.data[i] += d * s * (1.0 - t * t);
        dgate.data[i] += d * t * s * (1.0 - s);
    }
}

SeqTensor avg_pool_align(const SeqTensor& x, int kernel, int dilation) {
    const int out_len = conv_out_len(x.steps, kernel, dilation);
    const int window = (kernel - 1) * dilation + 1;
    const double inv = 1.0 / window;
    SeqTensor y(out_len, x.channels);
    for (int t = 0; t < out_len; ++t) {
        double* yt = y.at(t);
        for (int u = 0; u < window; ++u) {
            const double* xu = x.at(t + u);
            for (int c = 0; c < x.channels; ++c) yt[c] += xu[c];
        }
        for (int c = 0; c < x.channels; ++c) yt[c] *= inv;
    }
    return y;
}

void avg_pool_align_backward(int in_len, int kernel, int dilation,
                             const SeqTensor& dy, SeqTensor& dx) {
    const int window = (kernel - 1) * dilation + 1;
    const double inv = 1.0 / window;
    (void)in_len;
    for (int t = 0; t < dy.steps; ++t) {
        const double* dyt = dy.at(t);
        for (int u = 0; u < window; ++u) {
            double* dxu = dx.at(t + u);
            for (int c = 0; c < dy.channels; ++c) dxu[c] += dyt[c] * inv;
        }
    }
}

std::vector<double> dropout_mask(int channels, double p, Rng& rng) {
    if (p < 0.0 || p >= 1.0) {
        throw std::invalid_argument("dropout_mask: p must lie in [0, 1)");
    }
    std::vector<double> mask(channels, 1.0);
    if (p == 0.0) return mask;
    const double keep_scale = 1.0 / (1.0 - p);
    for (int c = 0; c < channels; ++c) {
        mask[c] = rng.bernoulli(p) ? 0.0 : keep_scale;
    }
    return mask;
}

void apply_channel_mask(SeqTensor& x, const std::vector<double>& mask) {
    if (int(mask.size()) != x.channels) {
        throw std::invalid_argument("apply_channel_mask: mask size mismatch");
    }
    for (int t = 0; t < x.steps; ++t) {
        double* xt = x.at(t);
        for (int c = 0; c < x.channels; ++c) xt[c] *= mask[c];
    }
}

SeqTensor spatial_dropout(const SeqTensor& x, double p, Rng* rng,
                          bool training) {
    SeqTensor y = x;
    if (!training || p == 0.0) return y;
    if (!rng) {
        throw std::invalid_argument("spatial_dropout: rng required in training mode");
    }
    apply_channel_mask(y, dropout_mask(x.channels, p, *rng));
    return y;
}

void leaky_relu_inplace(SeqTensor& x, double slope) {
    for (double& v : x.data) v = leaky_relu(v, slope);
}

void leaky_relu_backward(const SeqTensor& y, double slope, SeqTensor& dy) {
    const std::size_t n = y.data.size();
    for (std::size_t i = 0; i < n; ++i) {
        dy.data[i] *= leaky_relu_grad_from_output(y.data[i], slope);
    }
}

}  // namespace wtd
