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

#include <optional>
#include <string>
#include <vector>

#include "wtd/preprocess.hpp"

namespace wtd {

/// Skill metrics of one prediction vector against observations, in meters.
/// Correlation-based entries are std::nullopt when either vector is
/// constant (zero variance) — explicitly undefined, never a silent NaN.
struct EvaluationReport {
    std::string sensor_id;
    std::string model_kind;
    std::string split_name;
    int n = 0;

    double rmse = 0.0;   // meters
    double nrmse = 0.0;  // rmse / (training y_max - y_min)
    double bias = 0.0;   // mean(prediction - observation), meters
    double nbias = 0.0;  // bias / (training y_max - y_min)
    double mape = 0.0;   // mean(|error| / observation), fraction

    std::optional<double> pearson;
    double nse = 0.0;  // 1 - SSE / sum((y - training_mean)^2)
    std::optional<double> alpha;  // sigma_pred / sigma_obs
    std::optional<double> beta;   // mean_pred / mean_obs
    std::optional<double> kge;    // needs pearson, alpha, beta
};

/// Computes all metrics. Normalized entries and the NSE reference mean come
/// from the TRAINING-period statistics, not from the evaluation vectors.
/// Requires equal lengths >= 2 and nonzero observations (MAPE denominator).
/// Moments are population (1/N) throughout.
EvaluationReport compute_metrics(const std::vector<double>& y_hat,
                                 const std::vector<double>& y,
                                 const NormStats& train_stats);

/// Sensor/model rows followed, when several sensors are present, by a
/// mean row with population std in parentheses per model. Two-decimal
/// formatting; BIAS/NBIAS magnitudes that would round to 0.00 render as
/// "<0.01"; undefined entries render as "undef" and propagate to "undef"
/// summary cells.
std::string render_report_table(const std::vector<EvaluationReport>& reports);

/// Columnar counterpart (CSV): one row per report, empty fields where a
/// metric is undefined.
void write_report_csv(const std::vector<EvaluationReport>& reports,
                      const std::string& path);

}  // namespace wtd
