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

#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "wtd/preprocess.hpp"

using namespace wtd;

namespace {

RasterSeries make_raster(const GridGeometry& g, int n_weeks, int n_vars,
                         Date start) {
    RasterSeries rs;
    rs.geometry = g;
    for (int v = 0; v < n_vars; ++v) rs.variables.push_back("v" + std::to_string(v));
    rs.start_date = start;
    rs.n_weeks = n_weeks;
    rs.values.assign(std::size_t(n_weeks) * g.n_rows * g.n_cols * n_vars, 0.0);
    return rs;
}

const Date kMon0 = Date::from_iso("2015-01-05");

TargetSeries make_target(int n_weeks, Date start = kMon0) {
    TargetSeries ts;
    ts.sensor_id = "toy";
    ts.start_date = start;
    ts.values.assign(std::size_t(n_weeks), 2.0);
    for (int i = 0; i < n_weeks; ++i) {
        ts.values[std::size_t(i)] = 2.0 + 0.01 * i;  // non-constant
    }
    return ts;
}

}  // namespace

TEST_CASE("clip keeps exactly the cells with centers inside the box") {
    // 10x12 grid, 0.125-degree cells, lower-left corner (6.60 E, 44.10 N).
    GridGeometry g{6.60, 44.10, 0.125, 10, 12};
    RasterSeries rs = make_raster(g, 3, 2, kMon0);
    Rng rng(3);
    for (double& v : rs.values) v = rng.uniform(-1.0, 1.0);

    BBox box{6.90, 44.35, 7.79, 44.84};
    const RasterSeries clipped = clip_to_bbox(rs, box);
    CHECK(clipped.geometry.n_rows == 4);
    CHECK(clipped.geometry.n_cols == 8);

    // Cross-check by brute-force center containment against the original.
    int kept = 0;
    for (int r = 0; r < g.n_rows; ++r) {
        for (int c = 0; c < g.n_cols; ++c) {
            const double lon = g.center_lon(c);
            const double lat = g.center_lat(r);
            const bool inside = lon >= box.lon_min && lon <= box.lon_max &&
                                lat >= box.lat_min && lat <= box.lat_max;
            if (!inside) continue;
            ++kept;
            // Locate this cell in the clipped grid by its center coordinates
            // and verify every value survived unchanged.
            int cr = -1, cc = -1;
            for (int r2 = 0; r2 < clipped.geometry.n_rows; ++r2) {
                if (std::abs(clipped.geometry.center_lat(r2) - lat) < 1e-9) cr = r2;
            }
            for (int c2 = 0; c2 < clipped.geometry.n_cols; ++c2) {
                if (std::abs(clipped.geometry.center_lon(c2) - lon) < 1e-9) cc = c2;
            }
            REQUIRE(cr >= 0);
            REQUIRE(cc >= 0);
            for (int t = 0; t < rs.n_weeks; ++t) {
                for (int p = 0; p < 2; ++p) {
                    CHECK(clipped.at(t, cr, cc, p) == rs.at(t, r, c, p));
                }
            }
        }
    }
    CHECK(kept == 4 * 8);

    SUBCASE("identity clip") {
        BBox full{6.60, 44.10, 6.60 + 12 * 0.125, 44.10 + 10 * 0.125};
        const RasterSeries same = clip_to_bbox(rs, full);
        CHECK(same.geometry.n_rows == 10);
        CHECK(same.geometry.n_cols == 12);
        CHECK(same.values == rs.values);
    }
    SUBCASE("empty intersection throws") {
        BBox off{0.0, 0.0, 1.0, 1.0};
        CHECK_THROWS(clip_to_bbox(rs, off));
    }
}

TEST_CASE("pad_to_square centers data, extra cell bottom/right") {
    GridGeometry g{6.0, 44.0, 0.125, 4, 8};
    RasterSeries rs = make_raster(g, 2, 1, kMon0);
    for (int t = 0; t < 2; ++t) {
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 8; ++c) rs.at(t, r, c, 0) = 1.0 + r + 10 * c;
        }
    }
    const RasterSeries sq = pad_to_square(rs, 8);
    CHECK(sq.geometry.n_rows == 8);
    CHECK(sq.geometry.n_cols == 8);
    for (int t = 0; t < 2; ++t) {
        for (int r = 0; r < 8; ++r) {
            for (int c = 0; c < 8; ++c) {
                const bool data_row = r >= 2 && r <= 5;  // (8-4)/2 = 2 on top
                if (data_row) {
                    CHECK(sq.at(t, r, c, 0) == rs.at(t, r - 2, c, 0));
                } else {
                    CHECK(sq.at(t, r, c, 0) == 0.0);
                }
            }
        }
    }

    SUBCASE("odd margin puts the extra cell bottom/right") {
        GridGeometry g3{6.0, 44.0, 0.125, 3, 3};
        RasterSeries rs3 = make_raster(g3, 1, 1, kMon0);
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) rs3.at(0, r, c, 0) = 5.0;
        }
        const RasterSeries sq4 = pad_to_square(rs3, 4);
        // pad_top = (4-3)/2 = 0 -> data rows 0..2, zero row 3 (bottom).
        CHECK(sq4.at(0, 0, 0, 0) == 5.0);
        CHECK(sq4.at(0, 3, 0, 0) == 0.0);
        CHECK(sq4.at(0, 0, 3, 0) == 0.0);  // extra column on the right
    }
    SUBCASE("side smaller than a dimension throws") {
        CHECK_THROWS(pad_to_square(rs, 3));
    }
    SUBCASE("identity when already square at side") {
        GridGeometry g5{6.0, 44.0, 0.125, 5, 5};
        RasterSeries rs5 = make_raster(g5, 1, 1, kMon0);
        const RasterSeries same = pad_to_square(rs5, 5);
        CHECK(same.values == rs5.values);
    }
    SUBCASE("default side: larger dimension, floor 5") {
        CHECK(default_square_side(GridGeometry{0, 0, 0.125, 4, 8}) == 8);
        CHECK(default_square_side(GridGeometry{0, 0, 0.125, 3, 3}) == 5);
    }
}

TEST_CASE("weekly aggregation is a Monday-anchored mean over present days") {
    SUBCASE("days 1..7 average to 4") {
        DailySeries d;
        d.start = kMon0;
        for (int i = 1; i <= 7; ++i) d.values.push_back(double(i));
        const TargetSeries w = aggregate_weekly(d, "s");
        REQUIRE(w.values.size() == 1);
        CHECK(*w.values[0] == doctest::Approx(4.0).epsilon(1e-15));
        CHECK(w.start_date == kMon0);
    }
    SUBCASE("weeks with holes average the present values") {
        DailySeries d;
        d.start = kMon0;
        d.values = {2.0, std::nullopt, 4.0, std::nullopt, std::nullopt,
                    std::nullopt, std::nullopt};
        const TargetSeries w = aggregate_weekly(d, "s");
        REQUIRE(w.values.size() == 1);
        CHECK(*w.values[0] == doctest::Approx(3.0));
    }
    SUBCASE("an all-missing week stays missing") {
        DailySeries d;
        d.start = kMon0;
        for (int i = 0; i < 14; ++i) d.values.push_back(std::nullopt);
        d.values[10] = 6.0;  // second week only
        const TargetSeries w = aggregate_weekly(d, "s");
        REQUIRE(w.values.size() == 2);
        CHECK_FALSE(w.values[0].has_value());
        CHECK(*w.values[1] == 6.0);
    }
    SUBCASE("a series starting mid-week lands in the enclosing Monday week") {
        DailySeries d;
        d.start = kMon0.plus_days(2);  // Wednesday
        d.values = {3.0, 3.0};
        const TargetSeries w = aggregate_weekly(d, "s");
        CHECK(w.start_date == kMon0);
        REQUIRE(w.values.size() == 1);
        CHECK(*w.values[0] == 3.0);
    }
}

TEST_CASE("month encoding: Jan..Nov unit vectors, Dec zero") {
    const auto jan = month_one_hot(Date::from_iso("2015-01-15"));
    const auto nov = month_one_hot(Date::from_iso("2015-11-02"));
    const auto dec = month_one_hot(Date::from_iso("2015-12-07"));
    REQUIRE(jan.size() == 11);
    CHECK(jan[0] == 1.0);
    CHECK(nov[10] == 1.0);
    double jan_sum = 0, nov_sum = 0, dec_sum = 0;
    for (int i = 0; i < 11; ++i) {
        jan_sum += jan[std::size_t(i)];
        nov_sum += nov[std::size_t(i)];
        dec_sum += dec[std::size_t(i)];
    }
    CHECK(jan_sum == 1.0);
    CHECK(nov_sum == 1.0);
    CHECK(dec_sum == 0.0);
}

TEST_CASE("normalizer uses population statistics of the training period") {
    GridGeometry g{6.0, 44.0, 0.125, 2, 2};
    // Weather starts two weeks before the target so every T=1 window fits.
    RasterSeries early = make_raster(g, 8, 1, kMon0.plus_weeks(-2));
    Rng rng(12);
    for (double& v : early.values) v = rng.uniform(0.0, 4.0);

    TargetSeries ts;
    ts.sensor_id = "s";
    ts.start_date = kMon0;
    ts.values = {3.0, 5.0, std::nullopt, 4.5, 4.6, 4.7};

    // Train = weeks {0,1} (targets 3 and 5); val = {3}; test = {5}.
    const SplitIndex split = split_with_gaps(ts, kMon0.plus_weeks(1),
                                             kMon0.plus_weeks(4), 1, early);
    REQUIRE(split.membership[0] == Membership::Train);
    REQUIRE(split.membership[1] == Membership::Train);
    REQUIRE(split.membership[3] == Membership::Val);
    REQUIRE(split.membership[5] == Membership::Test);

    SUBCASE("a window preceding the weather record is short-history") {
        RasterSeries late = make_raster(g, 6, 1, kMon0);
        Rng r2(5);
        for (double& v : late.values) v = r2.uniform(0.0, 4.0);
        const SplitIndex sp = split_with_gaps(ts, kMon0.plus_weeks(1),
                                              kMon0.plus_weeks(4), 1, late);
        CHECK(sp.membership[0] == Membership::DroppedShortHistory);
        CHECK(sp.membership[1] == Membership::Train);
    }
    SUBCASE("zero-variance channel is an error") {
        RasterSeries flat = make_raster(g, 8, 1, kMon0.plus_weeks(-2));
        CHECK_THROWS_WITH_AS(fit_normalizer(flat, ts, split),
                             doctest::Contains("variance"), std::exception);
    }
    SUBCASE("target stats {3,5} -> mean 4, std 1; round trip identity") {
        const NormStats st = fit_normalizer(early, ts, split);
        CHECK(st.y_mean == doctest::Approx(4.0).epsilon(1e-15));
        CHECK(st.y_std == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(st.y_min == 3.0);
        CHECK(st.y_max == 5.0);
        CHECK(st.denormalize_target(st.normalize_target(4.37)) ==
              doctest::Approx(4.37).epsilon(1e-12));

        // Weather stats: verify against a direct two-pass computation over
        // training-period weeks (dates <= train_end -> 'early' weeks 0..3).
        double s = 0.0;
        int n = 0;
        for (int t = 0; t < early.n_weeks; ++t) {
            if (early.week_date(t) <= kMon0.plus_weeks(1)) {
                for (int r = 0; r < 2; ++r)
                    for (int c = 0; c < 2; ++c) {
                        s += early.at(t, r, c, 0);
                        ++n;
                    }
            }
        }
        REQUIRE(n == 16);  // 4 weeks x 4 cells
        const double mean = s / n;
        CHECK(st.weather_mean[0] == doctest::Approx(mean).epsilon(1e-12));

        // Normalized weather has the stats removed.
        const RasterSeries nw = normalize_weather(early, st);
        CHECK(nw.at(0, 0, 0, 0) ==
              doctest::Approx((early.at(0, 0, 0, 0) - mean) /
                              st.weather_std[0])
                  .epsilon(1e-12));
    }
}

TEST_CASE("toy split: 30 weeks, T=4 -> val opens at week 14, test at 24") {
    // Weather starts T weeks before the target so no window is short.
    GridGeometry g{6.0, 44.0, 0.125, 2, 2};
    RasterSeries rs = make_raster(g, 40, 1, kMon0.plus_weeks(-4));
    TargetSeries ts = make_target(30);

    // Cuts at week indices 10 and 20: train dates are weeks 0..9.
    const SplitIndex split = split_with_gaps(ts, kMon0.plus_weeks(9),
                                             kMon0.plus_weeks(20), 4, rs);

    auto member = [&](int w) { return split.membership[std::size_t(w)]; };
    for (int w = 0; w <= 9; ++w) CHECK(member(w) == Membership::Train);
    for (int w = 10; w <= 13; ++w) CHECK(member(w) == Membership::DroppedGap);
    for (int w = 14; w <= 19; ++w) CHECK(member(w) == Membership::Val);
    for (int w = 20; w <= 23; ++w) CHECK(member(w) == Membership::DroppedGap);
    for (int w = 24; w <= 29; ++w) CHECK(member(w) == Membership::Test);

    // No window of a later set overlaps a window of an earlier set.
    CHECK(oracle::count_cross_set_overlaps(split) == 0);

    SUBCASE("a natural >=T missing block absorbs the gap entirely") {
        TargetSeries holey = make_target(30);
        for (int w = 10; w <= 13; ++w) holey.values[std::size_t(w)] = std::nullopt;
        const SplitIndex sp = split_with_gaps(holey, kMon0.plus_weeks(9),
                                              kMon0.plus_weeks(20), 4, rs);
        CHECK(sp.count(Membership::DroppedGap) == 4);  // only the test side
        CHECK(sp.membership[14] == Membership::Val);
        for (int w = 10; w <= 13; ++w) {
            CHECK(sp.membership[std::size_t(w)] == Membership::DroppedMissing);
        }
    }
    SUBCASE("degenerate T rejected") {
        CHECK_THROWS(split_with_gaps(ts, kMon0.plus_weeks(9),
                                     kMon0.plus_weeks(20), 0, rs));
    }
    SUBCASE("a split that empties a set throws with counts") {
        TargetSeries tiny = make_target(12);  // no week reaches test_start
        CHECK_THROWS(split_with_gaps(tiny, kMon0.plus_weeks(9),
                                     kMon0.plus_weeks(20), 4, rs));
    }
}

TEST_CASE("split property: random holes never create cross-set overlaps") {
    GridGeometry g{6.0, 44.0, 0.125, 2, 2};
    Rng rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        const int T = 1 + int(rng.uniform_int(10));
        const int n = 60;
        RasterSeries rs = make_raster(g, n + T, 1, kMon0.plus_weeks(-T));
        TargetSeries ts = make_target(n);
        for (int w = 0; w < n; ++w) {
            if (rng.bernoulli(0.15)) ts.values[std::size_t(w)] = std::nullopt;
        }
        SplitIndex split;
        try {
            split = split_with_gaps(ts, kMon0.plus_weeks(19),
                                    kMon0.plus_weeks(40), T, rs);
        } catch (const std::exception&) {
            continue;  // a hole pattern emptied a set; nothing to check
        }
        CHECK(oracle::count_cross_set_overlaps(split) == 0);

        // Stronger form actually enforced: T unused weeks between sets.
        const auto tr = split.set_weeks(SplitSet::Train);
        const auto va = split.set_weeks(SplitSet::Val);
        const auto te = split.set_weeks(SplitSet::Test);
        if (!tr.empty() && !va.empty()) CHECK(va.front() - tr.back() > T);
        if (!va.empty() && !te.empty()) CHECK(te.front() - va.back() > T);
    }
}

TEST_CASE("windowing: exogenous-only samples over the weather record") {
    GridGeometry g{6.0, 44.0, 0.125, 5, 5};
    const int n_weeks = 120;
    RasterSeries rs = make_raster(g, n_weeks, 1, kMon0);
    // Cell value = week index so window contents are checkable by eye.
    for (int t = 0; t < n_weeks; ++t) {
        for (int r = 0; r < 5; ++r)
            for (int c = 0; c < 5; ++c) rs.at(t, r, c, 0) = double(t);
    }
    TargetSeries ts = make_target(n_weeks);
    const int T = 104;
    // Hand-built membership (a 120-week record is far too short for a
    // T-gapped three-way split): train 104..110, one val, one test date.
    SplitIndex split;
    split.target_start = kMon0;
    split.train_end = kMon0.plus_weeks(110);
    split.test_start = kMon0.plus_weeks(119);
    split.t_window = T;
    split.membership.assign(n_weeks, Membership::DroppedGap);
    for (int w = 0; w < T; ++w) {
        split.membership[std::size_t(w)] = Membership::DroppedShortHistory;
    }
    for (int w = T; w <= 110; ++w) {
        split.membership[std::size_t(w)] = Membership::Train;
    }
    split.membership[115] = Membership::Val;
    split.membership[119] = Membership::Test;

    NormStats stats;  // identity normalization for the check below
    stats.weather_mean = {0.0};
    stats.weather_std = {1.0};
    stats.y_mean = 0.0;
    stats.y_std = 1.0;
    stats.y_min = 2.0;
    stats.y_max = 3.2;
    const WindowedDataset data = build_windows(rs, ts, split, stats);

    // First feasible prediction week is index T (its window is [0, T-1]).
    REQUIRE_FALSE(data.samples.empty());
    CHECK(data.samples.front().date == kMon0.plus_weeks(T));
    CHECK(data.samples.size() ==
          split.count(Membership::Train) + split.count(Membership::Val) +
              split.count(Membership::Test));

    // The window ends at t-1: its last frame must carry value t-1, never t.
    const Sample& s0 = data.samples.front();
    const WindowInput in = data.input(s0);
    CHECK(in.steps == T);
    CHECK(in.frame(T - 1)[0] == double(T - 1));
    CHECK(in.frame(0)[0] == 0.0);
    // Months follow the calendar of each frame's week.
    CHECK(in.months[T - 1] == kMon0.plus_weeks(T - 1).month());

    SUBCASE("window exiting the record is an error") {
        // Same split over a record trimmed to 118 weeks: the test sample at
        // week 119 needs weather week 118, which no longer exists.
        RasterSeries shorter = rs;
        shorter.n_weeks = 118;
        shorter.values.resize(std::size_t(118) * 25);
        CHECK_THROWS(build_windows(shorter, ts, split, stats));
    }
}

TEST_CASE("assemble_dataset wires clip, split, stats, pad, and windows") {
    GridGeometry g{7.0, 44.5, 0.125, 6, 6};
    auto [weather, target] = generate_synthetic_case(5, g, 330);

    AssembleOptions opt;
    opt.train_end = weather.week_date(200);
    opt.test_start = weather.week_date(260);
    // T must leave room for a gapped val set between the boundaries: with
    // T=30, val runs 231..259 (first week whose window clears train_end).
    opt.t_window = 30;
    const WindowedDataset data = assemble_dataset(weather, target, opt);

    CHECK(data.weather.geometry.n_rows == 6);  // default side = max(6,6,5)
    CHECK(data.weather.geometry.n_cols == 6);
    CHECK(data.t_window == 30);
    REQUIRE_FALSE(data.samples.empty());

    // Sets are ordered and disjoint in time.
    Date last_train = Date::from_iso("1900-01-06");
    Date first_test = Date::from_iso("2900-01-06");
    int n_train = 0, n_val = 0, n_test = 0;
    for (const auto& s : data.samples) {
        if (s.set == SplitSet::Train) {
            ++n_train;
            last_train = std::max(last_train, s.date);
            CHECK(s.date <= opt.train_end);
        } else if (s.set == SplitSet::Val) {
            ++n_val;
        } else {
            ++n_test;
            first_test = std::min(first_test, s.date);
            CHECK(opt.test_start <= s.date);
        }
        // Normalized target round-trips to the raw value.
        CHECK(data.stats.denormalize_target(s.target_z) ==
              doctest::Approx(s.target_raw).epsilon(1e-10));
    }
    //.. and counts match the gap rule by hand: train 30..200 (first 26
    // target weeks are missing but 30 >= 26), val 231..259, test 290..329.
    CHECK(n_train == 171);
    CHECK(n_val == 29);
    CHECK(n_test == 40);
    CHECK(last_train == weather.week_date(200));
    CHECK(first_test == weather.week_date(290));

    // Weather got normalized: per-channel global mean over the training
    // period is ~0 by construction.
    // (Padding added no rows here since the grid was already square.)
    const WindowInput in = data.input(data.samples.front());
    CHECK(in.rows == 6);
    CHECK(in.channels == 3);
}
