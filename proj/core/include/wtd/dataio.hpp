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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wtd/date.hpp"

namespace wtd {

/// Regular lon/lat grid. The origin is the LOWER-LEFT corner of the grid;
/// row 0 of the value arrays is the NORTHERNMOST row (map orientation), so
/// row r's cell centers sit at origin_lat + (n_rows - 1 - r + 0.5)*cell_size.
struct GridGeometry {
    double origin_lon = 0.0;
    double origin_lat = 0.0;
    double cell_size = 0.125;
    int n_rows = 0;
    int n_cols = 0;

    double center_lon(int col) const {
        return origin_lon + (col + 0.5) * cell_size;
    }
    double center_lat(int row) const {
        return origin_lat + (n_rows - 1 - row + 0.5) * cell_size;
    }
};

/// Weekly stack of P-channel grids, gap-free. Values are indexed
/// (week, row, col, variable) with the variable index fastest.
struct RasterSeries {
    GridGeometry geometry;
    std::vector<std::string> variables;
    Date start_date;  // Monday of the first week
    int n_weeks = 0;
    std::vector<double> values;

    int n_vars() const { return int(variables.size()); }
    Date week_date(int t) const { return start_date.plus_weeks(t); }
    std::size_t index(int t, int r, int c, int p) const {
        return ((std::size_t(t) * geometry.n_rows + r) * geometry.n_cols + c) *
                   variables.size() +
               p;
    }
    double at(int t, int r, int c, int p) const {
        return values[index(t, r, c, p)];
    }
    double& at(int t, int r, int c, int p) { return values[index(t, r, c, p)]; }
};

/// Weekly scalar depth record, dense over its span with explicit missing
/// entries (no imputation anywhere).
struct TargetSeries {
    std::string sensor_id;
    Date start_date;  // Monday of the first week
    std::vector<std::optional<double>> values;  // meters below surface

    int n_weeks() const { return int(values.size()); }
    Date week_date(int t) const { return start_date.plus_weeks(t); }
    std::size_t n_observed() const;
};

/// Per-date ensemble summary, in meters.
struct PredictionSeries {
    std::vector<Date> dates;
    std::vector<double> mean;
    std::vector<double> stddev;
};

// ---------------------------------------------------------------------------
// Grid stack directory format: geometry.json sidecar (origin_lon, origin_lat,
// cell_size, n_rows, n_cols, variables[ordered], start_date, n_weeks) plus
// one `<var>.csv` per variable with header date,cell_0_0,...,cell_{R-1}_{C-1}
// (row-major). All numbers use enough digits to round-trip exactly.
// ---------------------------------------------------------------------------

RasterSeries load_grid_stack(const std::string& dir);
void save_grid_stack(const RasterSeries& rs, const std::string& dir);

/// Target format: `<sensor_id>.csv` with header date,depth_m; an empty depth
/// field marks a missing week. The sensor id is the file stem. Dates must be
/// strictly increasing Mondays; weeks absent from the file become missing.
TargetSeries load_target_series(const std::string& csv_path);
void save_target_series(const TargetSeries& ts, const std::string& csv_path);

/// Predictions: header date,ensemble_mean_m,ensemble_std_m.
void write_predictions(const PredictionSeries& preds, const std::string& path);
PredictionSeries read_predictions(const std::string& path);

// ---------------------------------------------------------------------------
// Synthetic case
// ---------------------------------------------------------------------------

struct SynthOptions {
    /// Std of the irreducible target noise, meters. Zero makes the target an
    /// exact closed-form function of the generated weather and calendar.
    double target_noise_std = 0.17;
};

/// Desk-scale stand-in for a real sensor/raster pair. Weather channels are a
/// seasonal sinusoid plus a slow AR(1) anomaly plus a fixed spatial gradient
/// plus spatially smoothed week noise; the target is an affine function of
/// the trailing 26-week mean of channel 0's spatial mean, plus an annual
/// sinusoid and small noise, scaled to a realistic depth regime (mean about
/// 4.4 m, std about 0.75 m). The first 26 weeks have no target (their
/// trailing window is incomplete). Pure function of (seed, geometry,
/// n_weeks, options); the record starts on Monday 2014-01-06.
std::pair<RasterSeries, TargetSeries> generate_synthetic_case(
    std::uint64_t seed, const GridGeometry& geometry, int n_weeks,
    const SynthOptions& options = {});

/// Trailing-window length the synthetic target depends on (weeks).
inline constexpr int kSynthTrailWeeks = 26;

/// Closed form of the noise-free synthetic target:
///   y[t] = intercept + weather_coef * w26[t]
///        + seasonal_amp * sin(omega * t + seasonal_phase)
/// where w26[t] is the mean over weeks [t-26, t-1] of channel 0's spatial
/// mean. Exposed so the generator can be cross-checked from its own output.
struct SynthTargetLaw {
    double intercept;
    double weather_coef;
    double seasonal_amp;
    double seasonal_phase;  // radians
    double omega;           // radians per week
};
SynthTargetLaw synth_target_law();

}  // namespace wtd
