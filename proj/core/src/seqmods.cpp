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

#include "wtd/seqmods.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace wtd {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::string to_string(ModelKind kind) {
    return kind == ModelKind::TdcLstm ? "tdc-lstm" : "tdc-unpwavenet";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "tdc-lstm") return ModelKind::TdcLstm;
    if (s == "tdc-unpwavenet") return ModelKind::TdcUnpWaveNet;
    throw std::invalid_argument(
        "unknown model kind '" + s + "'; expected tdc-lstm or tdc-unpwavenet");
}

ModelConfig make_default_config(ModelKind kind) {
    ModelConfig c;
    c.kind = kind;
    c.expected_param_total =
        kind == ModelKind::TdcLstm ? std::size_t{9705} : std::size_t{17915};
    return c;
}

// ---------------------------------------------------------------------------
// LSTM
// ---------------------------------------------------------------------------

void lstm_forward(const SeqTensor& x, const Lstm& p, double slope,
                  double* h_final, LstmCache* cache) {
    if (x.channels != p.in) {
        throw std::invalid_argument("lstm_forward: input channel mismatch");
    }
    const int T = x.steps;
    const int in = p.in;
    const int u = p.units;
    const int G = 4 * u;
    if (cache) {
        cache->gates = SeqTensor(T, G);
        cache->c = SeqTensor(T, u);
        cache->h = SeqTensor(T, u);
    }
    std::vector<double> h(u, 0.0), c(u, 0.0), z(G);
    for (int t = 0; t < T; ++t) {
        for (int g = 0; g < G; ++g) z[g] = p.b[g];
        const double* xt = x.at(t);
        for (int i = 0; i < in; ++i) {
            const double xv = xt[i];
            const double* wi = p.w.data() + std::size_t(i) * G;
            for (int g = 0; g < G; ++g) z[g] += wi[g] * xv;
        }
        for (int j = 0; j < u; ++j) {
            const double hv = h[j];
            const double* wj = p.w.data() + std::size_t(in + j) * G;
            for (int g = 0; g < G; ++g) z[g] += wj[g] * hv;
        }
        for (int j = 0; j < u; ++j) {
            const double ig = sigmoid(z[j]);
            const double fg = sigmoid(z[u + j]);
            const double gg = leaky_relu(z[2 * u + j], slope);
            const double og = sigmoid(z[3 * u + j]);
            c[j] = fg * c[j] + ig * gg;
            h[j] = og * leaky_relu(c[j], slope);
            if (cache) {
                double* gt = cache->gates.at(t);
                gt[j] = ig;
                gt[u + j] = fg;
                gt[2 * u + j] = gg;
                gt[3 * u + j] = og;
                cache->c.at(t)[j] = c[j];
                cache->h.at(t)[j] = h[j];
            }
        }
    }
    std::copy(h.begin(), h.end(), h_final);
}

void lstm_backward(const SeqTensor& x, const Lstm& p, double slope,
                   const LstmCache& cache, const double* dh_final,
                   SeqTensor* dx, Lstm& grad) {
    const int T = x.steps;
    const int in = p.in;
    const int u = p.units;
    const int G = 4 * u;
    std::vector<double> dh(dh_final, dh_final + u);
    std::vector<double> dc(u, 0.0), dz(G);
    for (int t = T - 1; t >= 0; --t) {
        const double* gates = cache.gates.at(t);
        const double* ct = cache.c.at(t);
        const double* cprev = t > 0 ? cache.c.at(t - 1) : nullptr;
        for (int j = 0; j < u; ++j) {
            const double ig = gates[j];
            const double fg = gates[u + j];
            const double gg = gates[2 * u + j];
            const double og = gates[3 * u + j];
            const double act_c = leaky_relu(ct[j], slope);
            // Cell-state gradient: from this step's output and from t+1.
            const double dcj =
                dc[j] + dh[j] * og * (ct[j] >= 0.0 ? 1.0 : slope);
            const double cp = cprev ? cprev[j] : 0.0;
            dz[j] = dcj * gg * ig * (1.0 - ig);
            dz[u + j] = dcj * cp * fg * (1.0 - fg);
            // slope > 0 keeps sign(gg) == sign(pre-activation).
            dz[2 * u + j] = dcj * ig * (gg >= 0.0 ? 1.0 : slope);
            dz[3 * u + j] = dh[j] * act_c * og * (1.0 - og);
            dc[j] = dcj * fg;
        }
        for (int g = 0; g < G; ++g) grad.b[g] += dz[g];
        const double* xt = x.at(t);
        double* dxt = dx ? dx->at(t) : nullptr;
        for (int i = 0; i < in; ++i) {
            const double xv = xt[i];
            double* gi = grad.w.data() + std::size_t(i) * G;
            const double* wi = p.w.data() + std::size_t(i) * G;
            double acc = 0.0;
            for (int g = 0; g < G; ++g) {
                gi[g] += dz[g] * xv;
                acc += dz[g] * wi[g];
            }
            if (dxt) dxt[i] += acc;
        }
        const double* hprev = t > 0 ? cache.h.at(t - 1) : nullptr;
        for (int j = 0; j < u; ++j) {
            const double hv = hprev ? hprev[j] : 0.0;
            double* gj = grad.w.data() + std::size_t(in + j) * G;
            const double* wj = p.w.data() + std::size_t(in + j) * G;
            double acc = 0.0;
            for (int g = 0; g < G; ++g) {
                gj[g] += dz[g] * hv;
                acc += dz[g] * wj[g];
            }
            // The readout uses only the final state, so the sole path into
            // h_{t-1} is through this step's pre-activations.
            dh[j] = acc;
        }
    }
}

// ---------------------------------------------------------------------------
// Parameter assembly and accounting
// ---------------------------------------------------------------------------

ModelParams make_params(const ModelConfig& cfg) {
    ModelParams p;
    p.tdc = make_tdc_params(cfg.channels, cfg.tdc_filters);
    const int D = cfg.tdc_filters[3] + kMonthOheDim;
    if (cfg.kind == ModelKind::TdcLstm) {
        LstmHeadParams h;
        h.bottleneck = Affine(D, cfg.bottleneck_dim);
        h.lstm = Lstm(cfg.bottleneck_dim, cfg.lstm_units);
        h.dense = Affine(cfg.lstm_units, cfg.dense_dim);
        h.out = Affine(cfg.dense_dim, 1);
        p.lstm = std::move(h);
    } else {
        UnpHeadParams h;
        h.bottleneck = Conv1d(1, D, cfg.bottleneck_dim, 1);
        int len = cfg.t_window;
        int cin = cfg.bottleneck_dim;
        for (int l = 0; l < cfg.unp_layers; ++l) {
            UnpLayerParams lp;
            const int d = 1 << l;
            lp.filter = Conv1d(cfg.unp_kernel, cin, cfg.unp_filters, d);
            lp.gate = Conv1d(cfg.unp_kernel, cin, cfg.unp_filters, d);
            lp.proj = Conv1d(1, cfg.unp_filters, cfg.unp_res_channels, 1);
            if (l == 0 && cin != cfg.unp_res_channels) {
                lp.res_proj = Conv1d(1, cin, cfg.unp_res_channels, 1);
            }
            len = conv_out_len(len, cfg.unp_kernel, d);
            lp.cd = Affine(len, cfg.cd_out_len);
            h.layers.push_back(std::move(lp));
            cin = cfg.unp_res_channels;
        }
        const int skip_width =
            cfg.unp_res_channels * cfg.cd_out_len * cfg.unp_layers;
        h.skip_out = Conv1d(1, skip_width, cfg.unp_res_channels, 1);
        h.out = Affine(cfg.unp_res_channels, 1);
        p.unp = std::move(h);
    }
    return p;
}

static std::vector<NamedBlock> collect_blocks(ModelParams& p) {
    std::vector<NamedBlock> out;
    auto add_pair = [&out](const std::string& name, std::vector<double>& w,
                           std::vector<double>& b) {
        out.push_back({name + ".w", &w});
        out.push_back({name + ".b", &b});
    };
    for (std::size_t i = 0; i < p.tdc.convs.size(); ++i) {
        add_pair("tdc.conv" + std::to_string(i + 1), p.tdc.convs[i].w,
                 p.tdc.convs[i].b);
    }
    if (p.lstm) {
        LstmHeadParams& h = *p.lstm;
        add_pair("head.bottleneck", h.bottleneck.w, h.bottleneck.b);
        add_pair("head.lstm", h.lstm.w, h.lstm.b);
        add_pair("head.dense", h.dense.w, h.dense.b);
        add_pair("head.out", h.out.w, h.out.b);
    }
    if (p.unp) {
        UnpHeadParams& h = *p.unp;
        add_pair("head.bottleneck", h.bottleneck.w, h.bottleneck.b);
        for (std::size_t l = 0; l < h.layers.size(); ++l) {
            const std::string base = "head.layer" + std::to_string(l + 1);
            UnpLayerParams& lp = h.layers[l];
            add_pair(base + ".filter", lp.filter.w, lp.filter.b);
            add_pair(base + ".gate", lp.gate.w, lp.gate.b);
            add_pair(base + ".proj", lp.proj.w, lp.proj.b);
            if (lp.res_proj) {
                add_pair(base + ".res_proj", lp.res_proj->w, lp.res_proj->b);
            }
            add_pair(base + ".cd", lp.cd.w, lp.cd.b);
        }
        add_pair("head.skip_out", h.skip_out.w, h.skip_out.b);
        add_pair("head.out", h.out.w, h.out.b);
    }
    return out;
}

std::vector<NamedBlock> param_blocks(ModelParams& p) {
    return collect_blocks(p);
}

std::vector<ConstNamedBlock> param_blocks(const ModelParams& p) {
    // The const view reuses the non-const enumeration; blocks are only read.
    auto blocks = collect_blocks(const_cast<ModelParams&>(p));
    std::vector<ConstNamedBlock> out;
    out.reserve(blocks.size());
    for (auto& b : blocks) out.push_back({std::move(b.name), b.data});
    return out;
}

std::size_t count_parameters(const ModelParams& p) {
    std::size_t n = 0;
    for (const auto& b : param_blocks(p)) n += b.data->size();
    return n;
}

std::vector<std::pair<std::string, std::size_t>> parameter_breakdown(
    const ModelParams& p) {
    std::vector<std::pair<std::string, std::size_t>> out;
    for (const auto& b : param_blocks(p)) out.emplace_back(b.name, b.data->size());
    return out;
}

Model build_model(const ModelConfig& config) {
    Model m{config, make_params(config)};
    if (config.expected_param_total) {
        const std::size_t n = count_parameters(m.params);
        if (n != *config.expected_param_total) {
            throw std::runtime_error(
                "build_model: assembled " + std::to_string(n) +
                " parameters but the configuration pins " +
                std::to_string(*config.expected_param_total) +
                "; architecture drifted");
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Heads
// ---------------------------------------------------------------------------

static double lstm_head_forward(const SeqTensor& h, const LstmHeadParams& p,
                                const ModelConfig& cfg,
                                const std::vector<double>* drop_mask,
                                LstmHeadCache* cache) {
    SeqTensor bott = time_distributed_affine(h, p.bottleneck);
    leaky_relu_inplace(bott, cfg.leaky_slope);
    SeqTensor x = bott;
    if (drop_mask) apply_channel_mask(x, *drop_mask);
    std::vector<double> h_final(p.lstm.units);
    lstm_forward(x, p.lstm, cfg.leaky_slope, h_final.data(),
                 cache ? &cache->lstm : nullptr);
    std::vector<double> dense_out(p.dense.out);
    affine_forward(h_final.data(), p.dense, dense_out.data());
    for (double& v : dense_out) v = leaky_relu(v, cfg.leaky_slope);
    double y = 0.0;
    affine_forward(dense_out.data(), p.out, &y);
    if (cache) {
        cache->bott = std::move(bott);
        cache->x = std::move(x);
        cache->dense_out = std::move(dense_out);
    }
    return y;
}

static void lstm_head_backward(const SeqTensor& h, const LstmHeadParams& p,
                               const ModelConfig& cfg,
                               const LstmHeadCache& cache,
                               const std::vector<double>* drop_mask,
                               double dout, LstmHeadParams& grad,
                               SeqTensor& dh) {
    std::vector<double> ddense(p.dense.out, 0.0);
    affine_backward(cache.dense_out.data(), p.out, &dout, ddense.data(),
                    grad.out);
    for (int j = 0; j < p.dense.out; ++j) {
        ddense[j] *=
            leaky_relu_grad_from_output(cache.dense_out[j], cfg.leaky_slope);
    }
    const int T = cache.x.steps;
    std::vector<double> dh_final(p.lstm.units, 0.0);
    affine_backward(cache.lstm.h.at(T - 1), p.dense, ddense.data(),
                    dh_final.data(), grad.dense);
    SeqTensor dx(T, p.lstm.in);
    lstm_backward(cache.x, p.lstm, cfg.leaky_slope, cache.lstm,
                  dh_final.data(), &dx, grad.lstm);
    if (drop_mask) apply_channel_mask(dx, *drop_mask);
    leaky_relu_backward(cache.bott, cfg.leaky_slope, dx);
    time_distributed_affine_backward(h, p.bottleneck, dx, &dh, grad.bottleneck);
}

static double unp_head_forward(const SeqTensor& h, const UnpHeadParams& p,
                               const ModelConfig& cfg,
                               const std::vector<double>* drop_mask,
                               UnpHeadCache* cache) {
    SeqTensor bott = conv1d_forward(h, p.bottleneck);
    leaky_relu_inplace(bott, cfg.leaky_slope);
    SeqTensor x = bott;
    if (drop_mask) apply_channel_mask(x, *drop_mask);

    const int n_layers = int(p.layers.size());
    std::vector<double> skip_concat;
    skip_concat.reserve(std::size_t(p.skip_out.in_ch));
    if (cache) cache->layers.assign(n_layers, {});
    for (int l = 0; l < n_layers; ++l) {
        const UnpLayerParams& lp = p.layers[l];
        SeqTensor f = conv1d_forward(x, lp.filter);
        SeqTensor g = conv1d_forward(x, lp.gate);
        GatedCache gc;
        SeqTensor gated = gated_activation(f, g, cache ? &gc : nullptr);
        SeqTensor s = conv1d_forward(gated, lp.proj);
        SeqTensor skip = channel_distributed(s, lp.cd);
        skip_concat.insert(skip_concat.end(), skip.data.begin(),
                           skip.data.end());

        SeqTensor pooled;
        SeqTensor next;
        if (l + 1 < n_layers) {
            // Residual stream: pool-aligned input (projected once, on the
            // first layer, to the 8-channel width) plus the 1x1 output.
            pooled = avg_pool_align(x, lp.filter.kernel, lp.filter.dilation);
            next = lp.res_proj ? conv1d_forward(pooled, *lp.res_proj) : pooled;
            for (std::size_t i = 0; i < next.data.size(); ++i) {
                next.data[i] += s.data[i];
            }
        }
        if (cache) {
            UnpLayerCache& lc = cache->layers[l];
            lc.x = std::move(x);
            lc.gated_cache = std::move(gc);
            lc.gated = std::move(gated);
            lc.s = std::move(s);
            lc.pooled = std::move(pooled);
        }
        x = std::move(next);
    }

    SeqTensor sc(1, int(skip_concat.size()));
    std::copy(skip_concat.begin(), skip_concat.end(), sc.data.begin());
    SeqTensor h8 = conv1d_forward(sc, p.skip_out);
    double y = 0.0;
    affine_forward(h8.at(0), p.out, &y);
    if (cache) {
        cache->bott = std::move(bott);
        cache->skip_concat = std::move(skip_concat);
        cache->head8.assign(h8.at(0), h8.at(0) + p.skip_out.out_ch);
    }
    return y;
}

static void unp_head_backward(const SeqTensor& h, const UnpHeadParams& p,
                              const ModelConfig& cfg,
                              const UnpHeadCache& cache,
                              const std::vector<double>* drop_mask,
                              double dout, UnpHeadParams& grad,
                              SeqTensor& dh) {
    std::vector<double> dh8(p.out.in, 0.0);
    affine_backward(cache.head8.data(), p.out, &dout, dh8.data(), grad.out);

    SeqTensor sc(1, int(cache.skip_concat.size()));
    std::copy(cache.skip_concat.begin(), cache.skip_concat.end(),
              sc.data.begin());
    SeqTensor dh8seq(1, p.skip_out.out_ch);
    std::copy(dh8.begin(), dh8.end(), dh8seq.data.begin());
    SeqTensor dsc(1, sc.channels);
    conv1d_backward(sc, p.skip_out, dh8seq, &dsc, grad.skip_out);

    const int n_layers = int(p.layers.size());
    SeqTensor dnext;  // gradient w.r.t. the layer's residual output
    std::size_t skip_off = cache.skip_concat.size();
    for (int l = n_layers - 1; l >= 0; --l) {
        const UnpLayerParams& lp = p.layers[l];
        const UnpLayerCache& lc = cache.layers[l];
        UnpLayerParams& glayer = grad.layers[l];

        // Slice this layer's skip gradient back to the CD output shape.
        const std::size_t skip_len = lc.s.channels * std::size_t(lp.cd.out);
        skip_off -= skip_len;
        SeqTensor dskip(lp.cd.out, lc.s.channels);
        std::copy(dsc.data.begin() + skip_off,
                  dsc.data.begin() + skip_off + skip_len, dskip.data.begin());

        SeqTensor ds(lc.s.steps, lc.s.channels);
        channel_distributed_backward(lc.s, lp.cd, dskip, &ds, glayer.cd);

        SeqTensor dx(lc.x.steps, lc.x.channels);
        if (l + 1 < n_layers) {
            // Residual split: the 1x1 output and the pooled base both feed
            // the next layer's input.
            for (std::size_t i = 0; i < ds.data.size(); ++i) {
                ds.data[i] += dnext.data[i];
            }
            if (lp.res_proj) {
                SeqTensor dpooled(lc.pooled.steps, lc.pooled.channels);
                conv1d_backward(lc.pooled, *lp.res_proj, dnext, &dpooled,
                                *glayer.res_proj);
                avg_pool_align_backward(lc.x.steps, lp.filter.kernel,
                                        lp.filter.dilation, dpooled, dx);
            } else {
                avg_pool_align_backward(lc.x.steps, lp.filter.kernel,
                                        lp.filter.dilation, dnext, dx);
            }
        }

        SeqTensor dgated(lc.gated.steps, lc.gated.channels);
        conv1d_backward(lc.gated, lp.proj, ds, &dgated, glayer.proj);
        SeqTensor df(lc.gated.steps, lc.gated.channels);
        SeqTensor dg(lc.gated.steps, lc.gated.channels);
        gated_backward(lc.gated_cache, dgated, df, dg);
        conv1d_backward(lc.x, lp.filter, df, &dx, glayer.filter);
        conv1d_backward(lc.x, lp.gate, dg, &dx, glayer.gate);
        dnext = std::move(dx);
    }

    if (drop_mask) apply_channel_mask(dnext, *drop_mask);
    leaky_relu_backward(cache.bott, cfg.leaky_slope, dnext);
    conv1d_backward(h, p.bottleneck, dnext, &dh, grad.bottleneck);
}

// ---------------------------------------------------------------------------
// Full model
// ---------------------------------------------------------------------------

double model_forward(const Model& m, const WindowInput& in,
                     const std::vector<double>* drop_mask, ModelCache* cache) {
    SeqTensor h = tdc_encode(in, m.params.tdc, m.config.leaky_slope,
                             cache ? &cache->tdc : nullptr);
    double y;
    if (m.config.kind == ModelKind::TdcLstm) {
        y = lstm_head_forward(h, *m.params.lstm, m.config, drop_mask,
                              cache ? &cache->lstm : nullptr);
    } else {
        y = unp_head_forward(h, *m.params.unp, m.config, drop_mask,
                             cache ? &cache->unp : nullptr);
    }
    if (cache) {
        cache->h = std::move(h);
        cache->dropout_mask =
            drop_mask ? *drop_mask : std::vector<double>{};
    }
    return y;
}

double model_predict(const Model& m, const WindowInput& in) {
    return model_forward(m, in, nullptr, nullptr);
}

void model_backward(const Model& m, const WindowInput& in,
                    const ModelCache& cache, double dout, ModelParams& grads) {
    SeqTensor dh(cache.h.steps, cache.h.channels);
    const std::vector<double>* mask =
        cache.dropout_mask.empty() ? nullptr : &cache.dropout_mask;
    if (m.config.kind == ModelKind::TdcLstm) {
        lstm_head_backward(cache.h, *m.params.lstm, m.config, cache.lstm, mask,
                           dout, *grads.lstm, dh);
    } else {
        unp_head_backward(cache.h, *m.params.unp, m.config, cache.unp, mask,
                          dout, *grads.unp, dh);
    }
    tdc_encode_backward(in, m.params.tdc, m.config.leaky_slope, cache.tdc, dh,
                        grads.tdc);
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

static nlohmann::json config_to_json(const ModelConfig& c) {
    nlohmann::json j;
    j["kind"] = to_string(c.kind);
    j["t_window"] = c.t_window;
    j["rows"] = c.rows;
    j["cols"] = c.cols;
    j["channels"] = c.channels;
    j["tdc_filters"] = c.tdc_filters;
    j["leaky_slope"] = c.leaky_slope;
    j["dropout_p"] = c.dropout_p;
    j["bottleneck_dim"] = c.bottleneck_dim;
    j["lstm_units"] = c.lstm_units;
    j["dense_dim"] = c.dense_dim;
    j["unp_layers"] = c.unp_layers;
    j["unp_filters"] = c.unp_filters;
    j["unp_kernel"] = c.unp_kernel;
    j["unp_res_channels"] = c.unp_res_channels;
    j["cd_out_len"] = c.cd_out_len;
    if (c.expected_param_total) {
        j["expected_param_total"] = *c.expected_param_total;
    } else {
        j["expected_param_total"] = nullptr;
    }
    return j;
}

static ModelConfig config_from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.kind = model_kind_from_string(j.at("kind").get<std::string>());
    c.t_window = j.at("t_window").get<int>();
    c.rows = j.at("rows").get<int>();
    c.cols = j.at("cols").get<int>();
    c.channels = j.at("channels").get<int>();
    c.tdc_filters = j.at("tdc_filters").get<std::array<int, 4>>();
    c.leaky_slope = j.at("leaky_slope").get<double>();
    c.dropout_p = j.at("dropout_p").get<double>();
    c.bottleneck_dim = j.at("bottleneck_dim").get<int>();
    c.lstm_units = j.at("lstm_units").get<int>();
    c.dense_dim = j.at("dense_dim").get<int>();
    c.unp_layers = j.at("unp_layers").get<int>();
    c.unp_filters = j.at("unp_filters").get<int>();
    c.unp_kernel = j.at("unp_kernel").get<int>();
    c.unp_res_channels = j.at("unp_res_channels").get<int>();
    c.cd_out_len = j.at("cd_out_len").get<int>();
    const auto& e = j.at("expected_param_total");
    if (!e.is_null()) c.expected_param_total = e.get<std::size_t>();
    return c;
}

void save_checkpoint(const Model& m, const std::string& path) {
    nlohmann::json j;
    j["format"] = "wtdcast-checkpoint";
    j["version"] = 1;
    j["config"] = config_to_json(m.config);
    nlohmann::json blocks = nlohmann::json::object();
    for (const auto& b : param_blocks(m.params)) blocks[b.name] = *b.data;
    j["blocks"] = std::move(blocks);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path);
    out << j.dump();
    out << '\n';
    if (!out.good()) throw std::runtime_error("write failed for " + path);
}

Model load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read checkpoint " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.at("format").get<std::string>() != "wtdcast-checkpoint") {
        throw std::runtime_error(path + " is not a checkpoint file");
    }
    if (j.at("version").get<int>() != 1) {
        throw std::runtime_error("unsupported checkpoint version in " + path);
    }
    Model m = build_model(config_from_json(j.at("config")));
    const nlohmann::json& blocks = j.at("blocks");
    std::size_t used = 0;
    for (auto& b : param_blocks(m.params)) {
        auto it = blocks.find(b.name);
        if (it == blocks.end()) {
            throw std::runtime_error("checkpoint missing block " + b.name);
        }
        auto vals = it->get<std::vector<double>>();
        if (vals.size() != b.data->size()) {
            throw std::runtime_error(
                "checkpoint block " + b.name + " holds " +
                std::to_string(vals.size()) + " values, expected " +
                std::to_string(b.data->size()));
        }
        *b.data = std::move(vals);
        ++used;
    }
    if (used != blocks.size()) {
        throw std::runtime_error("checkpoint has unknown extra blocks");
    }
    return m;
}

}  // namespace wtd
