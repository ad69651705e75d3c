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

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "wtd/metrics.hpp"

using namespace wtd;

namespace {

NormStats train_stats(double mean, double min, double max) {
    NormStats s;
    s.y_mean = mean;
    s.y_std = 1.0;
    s.y_min = min;
    s.y_max = max;
    return s;
}

// Pearson correlation straight from the definition, population moments.
double brute_pearson(const std::vector<double>& a,
                     const std::vector<double>& b) {
    const double ma = oracle::mean_of(a), mb = oracle::mean_of(b);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return cov / std::sqrt(va * vb);
}

}  // namespace

TEST_CASE("perfect prediction scores perfectly") {
    const std::vector<double> y = {3.2, 4.1, 5.0, 4.4};
    const EvaluationReport r = compute_metrics(y, y, train_stats(4.0, 3.0, 5.0));
    CHECK(r.n == 4);
    CHECK(r.rmse == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.nrmse == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.bias == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.nbias == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.mape == doctest::Approx(0.0).epsilon(1e-12));
    REQUIRE(r.pearson.has_value());
    CHECK(*r.pearson == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.nse == doctest::Approx(1.0).epsilon(1e-10));
    REQUIRE(r.alpha.has_value());
    REQUIRE(r.beta.has_value());
    REQUIRE(r.kge.has_value());
    CHECK(*r.alpha == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(*r.beta == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(*r.kge == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("the training-mean predictor sits at the NSE benchmark of zero") {
    const std::vector<double> y = {1.0, 2.0, 3.0, 6.0};  // training mean 3
    const std::vector<double> y_hat(4, 3.0);
    const EvaluationReport r =
        compute_metrics(y_hat, y, train_stats(3.0, 1.0, 6.0));
    CHECK(r.nse == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(r.pearson.has_value());  // constant prediction
    CHECK_FALSE(r.kge.has_value());
    REQUIRE(r.alpha.has_value());
    CHECK(*r.alpha == doctest::Approx(0.0).epsilon(1e-12));
    REQUIRE(r.beta.has_value());
    CHECK(*r.beta == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hand-evaluated flat prediction on a three-point series") {
    const std::vector<double> y = {1.0, 2.0, 3.0};
    const std::vector<double> y_hat = {2.0, 2.0, 2.0};
    const EvaluationReport r =
        compute_metrics(y_hat, y, train_stats(2.0, 1.0, 3.0));

    CHECK(r.rmse == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-10));
    CHECK(r.nrmse == doctest::Approx(std::sqrt(2.0 / 3.0) / 2.0).epsilon(1e-10));
    CHECK(r.bias == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.nbias == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.mape == doctest::Approx(4.0 / 9.0).epsilon(1e-10));
    CHECK(r.nse == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(r.pearson.has_value());
    CHECK_FALSE(r.kge.has_value());

    SUBCASE("the NSE reference is the training mean, not the sample mean") {
        // Same vectors, shifted training mean: the reference sum changes
        // from 2 to 2.75, so NSE moves off zero.
        const EvaluationReport s =
            compute_metrics(y_hat, y, train_stats(1.5, 1.0, 3.0));
        CHECK(s.nse == doctest::Approx(1.0 - 2.0 / 2.75).epsilon(1e-10));
        CHECK(s.nse != doctest::Approx(0.0).epsilon(1e-6));
    }
}

TEST_CASE("hand-evaluated doubled prediction pins the KGE arithmetic") {
    const std::vector<double> y = {1.0, 2.0, 3.0};
    const std::vector<double> y_hat = {2.0, 4.0, 6.0};
    const EvaluationReport r =
        compute_metrics(y_hat, y, train_stats(2.0, 1.0, 3.0));

    REQUIRE(r.pearson.has_value());
    CHECK(*r.pearson == doctest::Approx(1.0).epsilon(1e-10));
    REQUIRE(r.alpha.has_value());
    CHECK(*r.alpha == doctest::Approx(2.0).epsilon(1e-10));
    REQUIRE(r.beta.has_value());
    CHECK(*r.beta == doctest::Approx(2.0).epsilon(1e-10));
    REQUIRE(r.kge.has_value());
    CHECK(*r.kge == doctest::Approx(1.0 - std::sqrt(2.0)).epsilon(1e-10));

    CHECK(r.rmse == doctest::Approx(std::sqrt(14.0 / 3.0)).epsilon(1e-10));
    CHECK(r.bias == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(r.mape == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.nse == doctest::Approx(-6.0).epsilon(1e-10));
}

TEST_CASE("translation and scale behavior") {
    Rng rng(61);
    std::vector<double> y(5), y_hat(5);
    for (double& v : y) v = rng.uniform(2.0, 6.0);
    for (double& v : y_hat) v = rng.uniform(2.0, 6.0);
    const NormStats st = train_stats(4.0, 2.0, 6.0);
    const EvaluationReport base = compute_metrics(y_hat, y, st);

    SUBCASE("adding a constant to both vectors") {
        const double c = 3.7;
        std::vector<double> y2 = y, h2 = y_hat;
        for (double& v : y2) v += c;
        for (double& v : h2) v += c;
        const EvaluationReport r = compute_metrics(h2, y2, st);
        CHECK(r.rmse == doctest::Approx(base.rmse).epsilon(1e-12));
        CHECK(r.bias == doctest::Approx(base.bias).epsilon(1e-12));
        CHECK(*r.pearson == doctest::Approx(*base.pearson).epsilon(1e-12));
        CHECK(*r.alpha == doctest::Approx(*base.alpha).epsilon(1e-12));
    }
    SUBCASE("multiplying both vectors by k > 0") {
        const double k = 2.5;
        std::vector<double> y2 = y, h2 = y_hat;
        for (double& v : y2) v *= k;
        for (double& v : h2) v *= k;
        const EvaluationReport r = compute_metrics(h2, y2, st);
        CHECK(r.rmse == doctest::Approx(k * base.rmse).epsilon(1e-12));
        CHECK(r.bias == doctest::Approx(k * base.bias).epsilon(1e-12));
        CHECK(*r.pearson == doctest::Approx(*base.pearson).epsilon(1e-12));
        CHECK(*r.alpha == doctest::Approx(*base.alpha).epsilon(1e-12));
        CHECK(*r.beta == doctest::Approx(*base.beta).epsilon(1e-12));
        CHECK(*r.kge == doctest::Approx(*base.kge).epsilon(1e-12));
    }
}

TEST_CASE("pearson agrees with the brute-force definition") {
    Rng rng(62);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + int(rng.uniform(0.0, 4.999));
        std::vector<double> y(static_cast<std::size_t>(n));
        std::vector<double> h(static_cast<std::size_t>(n));
        for (double& v : y) v = rng.uniform(1.0, 9.0);
        for (double& v : h) v = rng.uniform(1.0, 9.0);
        const EvaluationReport r =
            compute_metrics(h, y, train_stats(5.0, 1.0, 9.0));
        if (!r.pearson) continue;  // a degenerate draw
        CHECK(*r.pearson == doctest::Approx(brute_pearson(h, y)).epsilon(1e-12));
    }
}

TEST_CASE("precondition violations are rejected") {
    const NormStats st = train_stats(2.0, 1.0, 3.0);
    CHECK_THROWS_AS(compute_metrics({1.0, 2.0}, {1.0}, st),
                    std::invalid_argument);
    CHECK_THROWS_AS(compute_metrics({1.0}, {1.0}, st), std::invalid_argument);
    CHECK_THROWS_AS(compute_metrics({1.0, 2.0}, {0.0, 2.0}, st),
                    std::invalid_argument);  // MAPE denominator
    NormStats flat = st;
    flat.y_min = flat.y_max = 2.0;  // zero training range
    CHECK_THROWS_AS(compute_metrics({1.0, 2.0}, {1.0, 2.0}, flat),
                    std::invalid_argument);
    // Observations identical to the training mean: NSE reference sum is 0.
    CHECK_THROWS_WITH_AS(compute_metrics({1.0, 2.0}, {2.0, 2.0}, st),
                         doctest::Contains("training mean"),
                         std::invalid_argument);
}

namespace {

EvaluationReport named_report(const std::string& sensor,
                              const std::string& model, double rmse,
                              double bias) {
    // A consistent synthetic report; only the fields the renderer touches
    // need to be meaningful.
    EvaluationReport r;
    r.sensor_id = sensor;
    r.model_kind = model;
    r.split_name = "test";
    r.n = 10;
    r.rmse = rmse;
    r.nrmse = rmse / 2.0;
    r.bias = bias;
    r.nbias = bias / 2.0;
    r.mape = 0.05;
    r.pearson = 0.9;
    r.nse = 0.8;
    r.alpha = 1.1;
    r.beta = 1.0;
    r.kge = 0.85;
    return r;
}

}  // namespace

TEST_CASE("report table: single row has no summary block") {
    const std::string t = render_report_table({named_report("wellA", "tdc-lstm", 0.37, 0.1)});
    CHECK(t.find("wellA") != std::string::npos);
    CHECK(t.find("tdc-lstm") != std::string::npos);
    CHECK(t.find("0.37") != std::string::npos);
    CHECK(t.find("Mean") == std::string::npos);
}

TEST_CASE("report table: per-model mean and spread rows") {
    std::vector<EvaluationReport> reports = {
        named_report("wellA", "tdc-lstm", 0.30, 0.10),
        named_report("wellB", "tdc-lstm", 0.40, 0.10),
        named_report("wellC", "tdc-lstm", 0.50, 0.10),
    };
    const std::string t = render_report_table(reports);
    CHECK(t.find("Mean") != std::string::npos);
    CHECK(t.find("0.40") != std::string::npos);  // mean RMSE
    // Population std of {0.3, 0.4, 0.5} is 0.0816 -> "(0.08)".
    CHECK(t.find("(0.08)") != std::string::npos);
}

TEST_CASE("report table: sub-0.01 magnitudes render as <0.01") {
    EvaluationReport r = named_report("wellA", "tdc-lstm", 0.37, -0.004);
    const std::string t = render_report_table({r});
    CHECK(t.find("<0.01") != std::string::npos);
    CHECK(t.find("-0.00") == std::string::npos);
}

TEST_CASE("report table: undefined correlations render as undef") {
    EvaluationReport r = named_report("wellA", "tdc-lstm", 0.37, 0.1);
    r.pearson.reset();
    r.kge.reset();
    const std::string t = render_report_table({r});
    CHECK(t.find("undef") != std::string::npos);
}

TEST_CASE("columnar report file") {
    oracle::TempDir tmp("metrics_csv");
    EvaluationReport r = named_report("wellA", "tdc-lstm", 0.375, 0.1);
    EvaluationReport u = named_report("wellB", "tdc-lstm", 0.5, 0.2);
    u.pearson.reset();
    u.kge.reset();
    const std::string path = tmp.str() + "/report.csv";
    write_report_csv({r, u}, path);

    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header, row1, row2;
    std::getline(in, header);
    std::getline(in, row1);
    std::getline(in, row2);
    CHECK(header ==
          "sensor,model,split,n,rmse_m,nrmse,bias_m,nbias,mape,pearson,nse,"
          "alpha,beta,kge");

    auto fields = [](const std::string& line) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) out.push_back(f);
        // A trailing empty field is invisible to getline; normalize.
        if (!line.empty() && line.back() == ',') out.push_back("");
        return out;
    };
    const auto f1 = fields(row1);
    REQUIRE(f1.size() == 14);
    CHECK(f1[0] == "wellA");
    CHECK(std::stod(f1[4]) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(std::stod(f1[9]) == doctest::Approx(0.9).epsilon(1e-15));

    const auto f2 = fields(row2);
    REQUIRE(f2.size() == 14);
    CHECK(f2[9].empty());   // undefined pearson
    CHECK(f2[13].empty());  // undefined kge
}
