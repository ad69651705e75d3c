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

#include "wtd/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wtd {

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Population variance (1/N).
double var_of(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / static_cast<double>(v.size());
}

}  // namespace

EvaluationReport compute_metrics(const std::vector<double>& y_hat,
                                 const std::vector<double>& y,
                                 const NormStats& train_stats) {
    if (y_hat.size() != y.size()) {
        throw std::invalid_argument(
            "compute_metrics: prediction/observation length mismatch (" +
            std::to_string(y_hat.size()) + " vs " + std::to_string(y.size()) + ")");
    }
    const std::size_t n = y.size();
    if (n < 2) {
        throw std::invalid_argument(
            "compute_metrics: need at least 2 samples, got " + std::to_string(n));
    }
    const double range = train_stats.y_max - train_stats.y_min;
    if (!(range > 0.0)) {
        throw std::invalid_argument(
            "compute_metrics: training target range must be positive");
    }

    double sq_sum = 0.0;
    double err_sum = 0.0;
    double ape_sum = 0.0;
    double ref_sq_sum = 0.0;  // spread around the training-period mean
    for (std::size_t i = 0; i < n; ++i) {
        if (y[i] == 0.0) {
            throw std::invalid_argument(
                "compute_metrics: observation " + std::to_string(i) +
                " is zero; relative error is undefined");
        }
        const double e = y_hat[i] - y[i];
        sq_sum += e * e;
        err_sum += e;
        ape_sum += std::abs(e) / y[i];
        const double d = y[i] - train_stats.y_mean;
        ref_sq_sum += d * d;
    }
    if (ref_sq_sum == 0.0) {
        throw std::invalid_argument(
            "compute_metrics: observations identical to the training mean; "
            "efficiency score is undefined");
    }

    EvaluationReport r;
    r.n = static_cast<int>(n);
    r.rmse = std::sqrt(sq_sum / static_cast<double>(n));
    r.nrmse = r.rmse / range;
    r.bias = err_sum / static_cast<double>(n);
    r.nbias = r.bias / range;
    r.mape = ape_sum / static_cast<double>(n);
    r.nse = 1.0 - sq_sum / ref_sq_sum;

    const double my = mean_of(y);
    const double mh = mean_of(y_hat);
    const double vy = var_of(y, my);
    const double vh = var_of(y_hat, mh);
    if (vy > 0.0 && vh > 0.0) {
        double cov = 0.0;
        for (std::size_t i = 0; i < n; ++i) cov += (y_hat[i] - mh) * (y[i] - my);
        cov /= static_cast<double>(n);
        r.pearson = cov / (std::sqrt(vh) * std::sqrt(vy));
    }
    if (vy > 0.0) r.alpha = std::sqrt(vh) / std::sqrt(vy);
    if (my != 0.0) r.beta = mh / my;
    if (r.pearson && r.alpha && r.beta) {
        const double a = *r.pearson - 1.0;
        const double b = *r.alpha - 1.0;
        const double c = *r.beta - 1.0;
        r.kge = 1.0 - std::sqrt(a * a + b * b + c * c);
    }
    return r;
}

namespace {

std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    std::string s(buf);
    if (s == "-0.00") s = "0.00";
    return s;
}

// Small BIAS/NBIAS magnitudes are reported as "<0.01" rather than a
// sign-losing "0.00".
std::string fmt_bias(double v) {
    if (std::abs(v) < 0.005) return "<0.01";
    return fmt2(v);
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt2(*v) : "undef";
}

struct Acc {
    std::vector<double> vals;
    bool all_defined = true;
    void add(double v) { vals.push_back(v); }
    void add(const std::optional<double>& v) {
        if (v) vals.push_back(*v);
        else all_defined = false;
    }
};

std::string acc_mean(const Acc& a, bool bias_style) {
    if (!a.all_defined || a.vals.empty()) return "undef";
    const double m = mean_of(a.vals);
    return bias_style ? fmt_bias(m) : fmt2(m);
}

std::string acc_sigma(const Acc& a) {
    if (!a.all_defined || a.vals.empty()) return "(undef)";
    const double m = mean_of(a.vals);
    return "(" + fmt2(std::sqrt(var_of(a.vals, m))) + ")";
}

}  // namespace

std::string render_report_table(const std::vector<EvaluationReport>& reports) {
    const std::vector<std::string> header = {"Sensor", "Model",  "RMSE [m]",
                                             "NRMSE",  "BIAS [m]", "NBIAS",
                                             "MAPE",   "rho",    "NSE",
                                             "KGE"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : reports) {
        std::string sensor = r.sensor_id;
        if (!r.split_name.empty()) sensor += " [" + r.split_name + "]";
        rows.push_back({sensor, r.model_kind, fmt2(r.rmse), fmt2(r.nrmse),
                        fmt_bias(r.bias), fmt_bias(r.nbias), fmt2(r.mape),
                        fmt_opt(r.pearson), fmt2(r.nse), fmt_opt(r.kge)});
    }

    // Per-model mean and population-std block, meaningful once a model has
    // been evaluated on more than one series.
    std::map<std::string, std::vector<const EvaluationReport*>> by_model;
    for (const auto& r : reports) by_model[r.model_kind].push_back(&r);
    std::vector<std::vector<std::string>> summary;
    for (const auto& [model, group] : by_model) {
        if (group.size() < 2) continue;
        Acc rmse, nrmse, bias, nbias, mape, rho, nse, kge;
        for (const auto* r : group) {
            rmse.add(r->rmse);
            nrmse.add(r->nrmse);
            bias.add(r->bias);
            nbias.add(r->nbias);
            mape.add(r->mape);
            rho.add(r->pearson);
            nse.add(r->nse);
            kge.add(r->kge);
        }
        summary.push_back({"Mean", model, acc_mean(rmse, false),
                           acc_mean(nrmse, false), acc_mean(bias, true),
                           acc_mean(nbias, true), acc_mean(mape, false),
                           acc_mean(rho, false), acc_mean(nse, false),
                           acc_mean(kge, false)});
        summary.push_back({"(sigma)", model, acc_sigma(rmse), acc_sigma(nrmse),
                           acc_sigma(bias), acc_sigma(nbias), acc_sigma(mape),
                           acc_sigma(rho), acc_sigma(nse), acc_sigma(kge)});
    }

    std::vector<std::size_t> width(header.size());
    auto widen = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c)
            width[c] = std::max(width[c], row[c].size());
    };
    widen(header);
    for (const auto& row : rows) widen(row);
    for (const auto& row : summary) widen(row);

    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << "  ";
            // Text columns left-aligned, numerics right-aligned.
            const bool left = c < 2;
            const std::size_t pad = width[c] - row[c].size();
            if (!left) out << std::string(pad, ' ');
            out << row[c];
            if (left && c + 1 < row.size()) out << std::string(pad, ' ');
        }
        out << '\n';
    };
    auto rule = [&] {
        std::size_t total = 0;
        for (std::size_t c = 0; c < width.size(); ++c)
            total += width[c] + (c ? 2 : 0);
        out << std::string(total, '-') << '\n';
    };

    emit(header);
    rule();
    for (const auto& row : rows) emit(row);
    if (!summary.empty()) {
        rule();
        for (const auto& row : summary) emit(row);
    }
    return out.str();
}

void write_report_csv(const std::vector<EvaluationReport>& reports,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "sensor,model,split,n,rmse_m,nrmse,bias_m,nbias,mape,"
           "pearson,nse,alpha,beta,kge\n";
    auto full = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    auto opt = [&](const std::optional<double>& v) {
        return v ? full(*v) : std::string();
    };
    for (const auto& r : reports) {
        out << r.sensor_id << ',' << r.model_kind << ',' << r.split_name << ','
            << r.n << ',' << full(r.rmse) << ',' << full(r.nrmse) << ','
            << full(r.bias) << ',' << full(r.nbias) << ',' << full(r.mape)
            << ',' << opt(r.pearson) << ',' << full(r.nse) << ','
            << opt(r.alpha) << ',' << opt(r.beta) << ',' << opt(r.kge) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace wtd
