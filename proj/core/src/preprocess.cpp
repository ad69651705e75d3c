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

#include "wtd/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wtd {

// ---------------------------------------------------------------------------
// Spatial preparation
// ---------------------------------------------------------------------------

RasterSeries clip_to_bbox(const RasterSeries& rs, const BBox& bbox) {
    const GridGeometry& g = rs.geometry;
    int c0 = -1, c1 = -1, r0 = -1, r1 = -1;
    for (int c = 0; c < g.n_cols; ++c) {
        const double lon = g.center_lon(c);
        if (lon >= bbox.lon_min && lon <= bbox.lon_max) {
            if (c0 < 0) c0 = c;
            c1 = c;
        }
    }
    for (int r = 0; r < g.n_rows; ++r) {
        const double lat = g.center_lat(r);
        if (lat >= bbox.lat_min && lat <= bbox.lat_max) {
            if (r0 < 0) r0 = r;
            r1 = r;
        }
    }
    if (c0 < 0 || r0 < 0) {
        throw std::invalid_argument(
            "clip_to_bbox: no cell centers inside the box (empty "
            "intersection)");
    }
    RasterSeries out;
    out.variables = rs.variables;
    out.start_date = rs.start_date;
    out.n_weeks = rs.n_weeks;
    out.geometry.cell_size = g.cell_size;
    out.geometry.n_rows = r1 - r0 + 1;
    out.geometry.n_cols = c1 - c0 + 1;
    out.geometry.origin_lon = g.origin_lon + c0 * g.cell_size;
    // Row r1 is the southernmost kept row; its lower edge is the new origin.
    out.geometry.origin_lat = g.origin_lat + (g.n_rows - 1 - r1) * g.cell_size;
    const int P = rs.n_vars();
    out.values.resize(std::size_t(out.n_weeks) * out.geometry.n_rows *
                      out.geometry.n_cols * P);
    for (int t = 0; t < rs.n_weeks; ++t) {
        for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) {
                for (int p = 0; p < P; ++p) {
                    out.at(t, r - r0, c - c0, p) = rs.at(t, r, c, p);
                }
            }
        }
    }
    return out;
}

int default_square_side(const GridGeometry& g) {
    return std::max({g.n_rows, g.n_cols, 5});
}

RasterSeries pad_to_square(const RasterSeries& rs, int side) {
    const GridGeometry& g = rs.geometry;
    if (side < std::max(g.n_rows, g.n_cols)) {
        throw std::invalid_argument(
            "pad_to_square: side " + std::to_string(side) +
            " smaller than grid " + std::to_string(g.n_rows) + "x" +
            std::to_string(g.n_cols));
    }
    const int pad_top = (side - g.n_rows) / 2;
    const int pad_left = (side - g.n_cols) / 2;
    const int pad_bottom = side - g.n_rows - pad_top;  // gets the odd cell
    RasterSeries out;
    out.variables = rs.variables;
    out.start_date = rs.start_date;
    out.n_weeks = rs.n_weeks;
    out.geometry.cell_size = g.cell_size;
    out.geometry.n_rows = side;
    out.geometry.n_cols = side;
    out.geometry.origin_lon = g.origin_lon - pad_left * g.cell_size;
    out.geometry.origin_lat = g.origin_lat - pad_bottom * g.cell_size;
    const int P = rs.n_vars();
    out.values.assign(std::size_t(out.n_weeks) * side * side * P, 0.0);
    for (int t = 0; t < rs.n_weeks; ++t) {
        for (int r = 0; r < g.n_rows; ++r) {
            for (int c = 0; c < g.n_cols; ++c) {
                for (int p = 0; p < P; ++p) {
                    out.at(t, r + pad_top, c + pad_left, p) = rs.at(t, r, c, p);
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Temporal preparation
// ---------------------------------------------------------------------------

TargetSeries aggregate_weekly(const DailySeries& daily,
                              const std::string& sensor_id) {
    if (daily.values.empty()) {
        throw std::invalid_argument("aggregate_weekly: empty series");
    }
    const Date first_week = daily.start.week_start();
    const Date last_day = daily.start.plus_days(long(daily.values.size()) - 1);
    const long n_weeks = first_week.days_until(last_day.week_start()) / 7 + 1;
    TargetSeries ts;
    ts.sensor_id = sensor_id;
    ts.start_date = first_week;
    ts.values.assign(std::size_t(n_weeks), std::nullopt);
    std::vector<double> sum(n_weeks, 0.0);
    std::vector<int> cnt(n_weeks, 0);
    for (std::size_t i = 0; i < daily.values.size(); ++i) {
        if (!daily.values[i]) continue;
        const Date d = daily.start.plus_days(long(i));
        const long w = first_week.days_until(d.week_start()) / 7;
        sum[w] += *daily.values[i];
        ++cnt[w];
    }
    for (long w = 0; w < n_weeks; ++w) {
        if (cnt[w] > 0) ts.values[w] = sum[w] / cnt[w];
    }
    return ts;
}

std::vector<double> month_one_hot(Date d) {
    std::vector<double> v(kMonthOheDim);
    month_one_hot(d.month(), v.data());
    return v;
}

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

std::vector<int> SplitIndex::set_weeks(SplitSet s) const {
    const Membership want = s == SplitSet::Train  ? Membership::Train
                            : s == SplitSet::Val ? Membership::Val
                                                 : Membership::Test;
    std::vector<int> out;
    for (std::size_t w = 0; w < membership.size(); ++w) {
        if (membership[w] == want) out.push_back(int(w));
    }
    return out;
}

std::size_t SplitIndex::count(Membership m) const {
    std::size_t n = 0;
    for (Membership x : membership) {
        if (x == m) ++n;
    }
    return n;
}

SplitIndex split_with_gaps(const TargetSeries& target, Date train_end,
                           Date test_start, int t_window,
                           const RasterSeries& weather) {
    if (t_window < 1) {
        throw std::invalid_argument("split_with_gaps: T must be >= 1");
    }
    if (!(train_end < test_start)) {
        throw std::invalid_argument(
            "split_with_gaps: train_end must precede test_start");
    }
    SplitIndex idx;
    idx.target_start = target.start_date;
    idx.train_end = train_end;
    idx.test_start = test_start;
    idx.t_window = t_window;
    idx.membership.resize(target.values.size());

    // Latest time step used by any kept earlier-set sample — its window
    // steps AND its own date (the labeled week). A later-set window may not
    // reach back into used territory, which leaves at least T fully unused
    // weeks between the last sample of one set and the first of the next.
    long last_covered_train = -(long(t_window) + 1);
    long last_covered_train_val = -(long(t_window) + 1);

    for (std::size_t w = 0; w < target.values.size(); ++w) {
        const Date d = target.week_date(int(w));
        if (!target.values[w]) {
            idx.membership[w] = Membership::DroppedMissing;
            continue;
        }
        // Window spans weeks [w - T, w - 1] relative to the target start.
        const Date window_first = d.plus_weeks(-t_window);
        if (window_first < weather.start_date) {
            idx.membership[w] = Membership::DroppedShortHistory;
            continue;
        }
        const long lw = long(w);
        if (d <= train_end) {
            idx.membership[w] = Membership::Train;
            last_covered_train = std::max(last_covered_train, lw);
            last_covered_train_val = std::max(last_covered_train_val, lw);
        } else if (d < test_start) {
            if (lw - t_window <= last_covered_train) {
                idx.membership[w] = Membership::DroppedGap;
            } else {
                idx.membership[w] = Membership::Val;
                last_covered_train_val = std::max(last_covered_train_val, lw);
            }
        } else {
            if (lw - t_window <= last_covered_train_val) {
                idx.membership[w] = Membership::DroppedGap;
            } else {
                idx.membership[w] = Membership::Test;
            }
        }
    }

    const std::size_t n_train = idx.count(Membership::Train);
    const std::size_t n_val = idx.count(Membership::Val);
    const std::size_t n_test = idx.count(Membership::Test);
    if (n_train == 0 || n_val == 0 || n_test == 0) {
        throw std::runtime_error(
            "split_with_gaps: empty set after gap handling (train=" +
            std::to_string(n_train) + ", val=" + std::to_string(n_val) +
            ", test=" + std::to_string(n_test) + ")");
    }
    return idx;
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

NormStats fit_normalizer(const RasterSeries& weather,
                         const TargetSeries& target, const SplitIndex& split) {
    NormStats s;
    const int P = weather.n_vars();
    s.weather_mean.assign(P, 0.0);
    s.weather_std.assign(P, 0.0);

    long train_weeks = 0;
    for (int t = 0; t < weather.n_weeks; ++t) {
        if (weather.week_date(t) <= split.train_end) ++train_weeks;
    }
    if (train_weeks == 0) {
        throw std::runtime_error(
            "fit_normalizer: no weather weeks inside the training period");
    }
    const std::size_t cells =
        std::size_t(weather.geometry.n_rows) * weather.geometry.n_cols;
    const double n = double(train_weeks) * double(cells);
    for (int p = 0; p < P; ++p) {
        double sum = 0.0, sumsq = 0.0;
        for (int t = 0; t < weather.n_weeks; ++t) {
            if (!(weather.week_date(t) <= split.train_end)) continue;
            for (int r = 0; r < weather.geometry.n_rows; ++r) {
                for (int c = 0; c < weather.geometry.n_cols; ++c) {
                    const double v = weather.at(t, r, c, p);
                    sum += v;
                    sumsq += v * v;
                }
            }
        }
        const double mean = sum / n;
        const double var = sumsq / n - mean * mean;
        if (var <= 0.0) {
            throw std::runtime_error("fit_normalizer: zero variance in channel " +
                                     weather.variables[p]);
        }
        s.weather_mean[p] = mean;
        s.weather_std[p] = std::sqrt(var);
    }

    double sum = 0.0, sumsq = 0.0;
    long cnt = 0;
    double ymin = 0.0, ymax = 0.0;
    for (int w = 0; w < target.n_weeks(); ++w) {
        if (!target.values[w]) continue;
        if (!(target.week_date(w) <= split.train_end)) continue;
        const double y = *target.values[w];
        if (cnt == 0) {
            ymin = ymax = y;
        } else {
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
        sum += y;
        sumsq += y * y;
        ++cnt;
    }
    if (cnt < 2) {
        throw std::runtime_error(
            "fit_normalizer: need at least 2 training targets, found " +
            std::to_string(cnt));
    }
    s.y_mean = sum / double(cnt);
    const double yvar = sumsq / double(cnt) - s.y_mean * s.y_mean;
    if (yvar <= 0.0) {
        throw std::runtime_error(
            "fit_normalizer: zero variance in training targets");
    }
    s.y_std = std::sqrt(yvar);
    s.y_min = ymin;
    s.y_max = ymax;
    return s;
}

RasterSeries normalize_weather(const RasterSeries& rs, const NormStats& stats) {
    if (int(stats.weather_mean.size()) != rs.n_vars()) {
        throw std::invalid_argument("normalize_weather: channel count mismatch");
    }
    RasterSeries out = rs;
    const int P = rs.n_vars();
    const std::size_t n = out.values.size();
    for (std::size_t i = 0; i < n; ++i) {
        const int p = int(i % P);
        out.values[i] = (out.values[i] - stats.weather_mean[p]) /
                        stats.weather_std[p];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Windowed samples
// ---------------------------------------------------------------------------

WindowInput WindowedDataset::input(const Sample& s) const {
    WindowInput in;
    in.steps = t_window;
    in.rows = weather.geometry.n_rows;
    in.cols = weather.geometry.n_cols;
    in.channels = weather.n_vars();
    const int first = s.weather_week - t_window;
    in.frames = weather.values.data() + weather.index(first, 0, 0, 0);
    in.months = week_months.data() + first;
    return in;
}

std::vector<const Sample*> WindowedDataset::set_samples(SplitSet set) const {
    std::vector<const Sample*> out;
    for (const Sample& s : samples) {
        if (s.set == set) out.push_back(&s);
    }
    return out;
}

WindowedDataset build_windows(const RasterSeries& weather,
                              const TargetSeries& target,
                              const SplitIndex& split, const NormStats& stats) {
    WindowedDataset ds;
    ds.weather = weather;
    ds.t_window = split.t_window;
    ds.stats = stats;
    ds.week_months.resize(weather.n_weeks);
    for (int t = 0; t < weather.n_weeks; ++t) {
        ds.week_months[t] = weather.week_date(t).month();
    }
    const Date weather_end = weather.week_date(weather.n_weeks - 1);
    for (std::size_t w = 0; w < split.membership.size(); ++w) {
        const Membership m = split.membership[w];
        if (m != Membership::Train && m != Membership::Val &&
            m != Membership::Test) {
            continue;
        }
        const Date d = target.week_date(int(w));
        const Date window_first = d.plus_weeks(-split.t_window);
        const Date window_last = d.plus_weeks(-1);
        if (window_first < weather.start_date || weather_end < window_last) {
            throw std::runtime_error(
                "build_windows: window for " + d.to_iso() +
                " exits the weather record (" + window_first.to_iso() + " .. " +
                window_last.to_iso() + ")");
        }
        Sample s;
        s.date = d;
        s.weather_week = int(weather.start_date.days_until(d) / 7);
        s.target_raw = *target.values[w];
        s.target_z = stats.normalize_target(s.target_raw);
        s.set = m == Membership::Train  ? SplitSet::Train
                : m == Membership::Val ? SplitSet::Val
                                       : SplitSet::Test;
        ds.samples.push_back(s);
    }
    return ds;
}

WindowedDataset assemble_dataset(const RasterSeries& raw_weather,
                                 const TargetSeries& target,
                                 const AssembleOptions& options) {
    RasterSeries clipped =
        options.bbox ? clip_to_bbox(raw_weather, *options.bbox) : raw_weather;
    const SplitIndex split =
        split_with_gaps(target, options.train_end, options.test_start,
                        options.t_window, clipped);
    const NormStats stats = fit_normalizer(clipped, target, split);
    RasterSeries normalized = normalize_weather(clipped, stats);
    const int side = options.square_side
                         ? *options.square_side
                         : default_square_side(normalized.geometry);
    RasterSeries padded = pad_to_square(normalized, side);
    return build_windows(padded, target, split, stats);
}

}  // namespace wtd
