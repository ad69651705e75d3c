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

#include "wtd/dataio.hpp"
#include "wtd/date.hpp"
#include "wtd/tdc.hpp"

namespace wtd {

// ---------------------------------------------------------------------------
// Spatial preparation
// ---------------------------------------------------------------------------

struct BBox {
    double lon_min = 0.0;
    double lat_min = 0.0;
    double lon_max = 0.0;
    double lat_max = 0.0;
};

/// Keeps exactly the cells whose centers lie inside the closed box (anchor
/// robust: containment, not snapping). Throws on empty intersection.
RasterSeries clip_to_bbox(const RasterSeries& rs, const BBox& bbox);

/// Zero-pads the grid to side x side, centered, with the extra cell going to
/// the bottom/right when the margin is odd. Padding zeros equal the training
/// mean only when applied AFTER normalization — callers normalize first.
RasterSeries pad_to_square(const RasterSeries& rs, int side);

/// Smallest admissible square side for a grid: at least the larger dimension
/// and at least 5 (four 2x2 valid convolutions need 5).
int default_square_side(const GridGeometry& g);

// ---------------------------------------------------------------------------
// Temporal preparation
// ---------------------------------------------------------------------------

/// Day-resolution scalar series with explicit missing entries.
struct DailySeries {
    Date start;
    std::vector<std::optional<double>> values;
};

/// Monday-anchored weekly means. Weeks average their present values only;
/// an all-missing week stays missing. Covers every week touching the span.
TargetSeries aggregate_weekly(const DailySeries& daily,
                              const std::string& sensor_id);

/// 11-dim month encoding of a date (see tdc.hpp for the convention).
std::vector<double> month_one_hot(Date d);

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

enum class SplitSet { Train, Val, Test };

/// Why a prediction date does or does not yield a sample.
enum class Membership {
    Train,
    Val,
    Test,
    DroppedGap,           // window would overlap an earlier set's windows
    DroppedMissing,       // target value missing at the date
    DroppedShortHistory,  // window starts before the weather record
};

struct SplitIndex {
    Date target_start;  // week 0 of the membership vector
    Date train_end;     // last date admissible for train (inclusive)
    Date test_start;    // first date admissible for test (inclusive)
    int t_window = 0;
    std::vector<Membership> membership;  // one entry per target week

    std::vector<int> set_weeks(SplitSet s) const;
    std::size_t count(Membership m) const;
};

/// Assigns each target week to train (date <= train_end), val
/// (train_end < date < test_start) or test (date >= test_start), then drops
/// the leading dates of val and test whose input windows [t-T, t-1] overlap
/// any time step inside a kept earlier-set sample window. Dates with missing
/// targets are dropped-missing; dates whose windows start before the weather
/// record are dropped-short-history. Throws if any set ends up empty,
/// listing the counts.
SplitIndex split_with_gaps(const TargetSeries& target, Date train_end,
                           Date test_start, int t_window,
                           const RasterSeries& weather);

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

/// Training-period statistics. Population (1/N) standard deviations
/// throughout, matching the evaluation moments.
struct NormStats {
    std::vector<double> weather_mean;  // per channel
    std::vector<double> weather_std;   // per channel
    double y_mean = 0.0;
    double y_std = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;

    double normalize_target(double y) const { return (y - y_mean) / y_std; }
    double denormalize_target(double z) const { return y_mean + z * y_std; }
};

/// Weather stats per channel over all cells of all weeks dated <= train_end;
/// target stats over non-missing values dated <= train_end (also y_min and
/// y_max for the normalized error metrics). Requires >= 2 training targets;
/// throws on any zero-variance channel or target.
NormStats fit_normalizer(const RasterSeries& weather,
                         const TargetSeries& target, const SplitIndex& split);

/// Returns a copy with z-scored values: (x - mean_channel) / std_channel.
RasterSeries normalize_weather(const RasterSeries& rs, const NormStats& stats);

// ---------------------------------------------------------------------------
// Windowed samples
// ---------------------------------------------------------------------------

struct Sample {
    Date date;            // prediction date t
    int weather_week = 0; // week index of t in the weather series
    double target_z = 0.0;
    double target_raw = 0.0;
    SplitSet set = SplitSet::Train;
};

/// Immutable once built. The (normalized, padded) weather tensor is shared:
/// a sample's input window [t-T, t-1] is a contiguous slice of it.
struct WindowedDataset {
    RasterSeries weather;          // normalized, padded
    std::vector<int> week_months;  // calendar month (1..12) per weather week
    int t_window = 0;
    NormStats stats;
    std::vector<Sample> samples;

    WindowInput input(const Sample& s) const;
    std::vector<const Sample*> set_samples(SplitSet set) const;
};

/// Materializes one sample per kept prediction date. The weather series must
/// already be normalized and padded. Throws when any window exits the
/// weather record.
WindowedDataset build_windows(const RasterSeries& weather,
                              const TargetSeries& target,
                              const SplitIndex& split, const NormStats& stats);

// ---------------------------------------------------------------------------
// One-stop pipeline
// ---------------------------------------------------------------------------

struct AssembleOptions {
    std::optional<BBox> bbox;        // clip first when present
    std::optional<int> square_side;  // default: default_square_side
    Date train_end;
    Date test_start;
    int t_window = 104;
};

/// clip -> split -> fit stats -> normalize -> pad -> window.
WindowedDataset assemble_dataset(const RasterSeries& raw_weather,
                                 const TargetSeries& target,
                                 const AssembleOptions& options);

}  // namespace wtd
