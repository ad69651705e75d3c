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

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "wtd/dataio.hpp"

using namespace wtd;
namespace fs = std::filesystem;

namespace {

RasterSeries small_stack() {
    RasterSeries rs;
    rs.geometry = {6.5, 44.0, 0.125, 3, 4};
    rs.variables = {"tp", "tmax"};
    rs.start_date = Date::from_iso("2015-01-05");
    rs.n_weeks = 5;
    rs.values.assign(std::size_t(5) * 3 * 4 * 2, 0.0);
    Rng rng(7);
    for (double& v : rs.values) v = rng.uniform(-3.0, 9.0);
    return rs;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

}  // namespace

TEST_CASE("date arithmetic and week anchoring") {
    const Date d = Date::from_iso("2016-01-01");  // a Friday
    CHECK(d.iso_weekday() == 5);
    CHECK(d.week_start().to_iso() == "2015-12-28");
    CHECK(d.week_start().is_monday());
    CHECK(d.plus_weeks(1).to_iso() == "2016-01-08");
    CHECK(Date::from_iso("2016-02-29").day() == 29);  // leap year accepted
    CHECK_THROWS(Date::from_iso("2015-02-29"));
    CHECK_THROWS(Date::from_iso("2015-13-01"));
    CHECK_THROWS(Date::from_iso("2015-1-1"));  // must be zero-padded ISO
    CHECK(Date::from_iso("2015-01-05").days_until(Date::from_iso("2015-01-12")) == 7);
}

TEST_CASE("grid stack round trip is exact") {
    const RasterSeries rs = small_stack();
    oracle::TempDir tmp("stack");
    save_grid_stack(rs, tmp.str());
    const RasterSeries back = load_grid_stack(tmp.str());
    CHECK(back.geometry.n_rows == 3);
    CHECK(back.geometry.n_cols == 4);
    CHECK(back.geometry.origin_lon == 6.5);  // sidecar stores %.17g, exact
    CHECK(back.variables == rs.variables);
    CHECK(back.start_date == rs.start_date);
    CHECK(back.n_weeks == 5);
    REQUIRE(back.values.size() == rs.values.size());
    for (std::size_t i = 0; i < rs.values.size(); ++i) {
        CHECK(back.values[i] == rs.values[i]);  // %.17g round-trips doubles
    }
}

TEST_CASE("grid stack loader rejects malformed inputs") {
    const RasterSeries rs = small_stack();

    SUBCASE("unknown sidecar key") {
        oracle::TempDir tmp("stack_badkey");
        save_grid_stack(rs, tmp.str());
        std::string meta = slurp(tmp.path / "geometry.json");
        meta.insert(meta.rfind('}'), ",\"projection\":\"EPSG:4326\"");
        spit(tmp.path / "geometry.json", meta);
        CHECK_THROWS_WITH_AS(load_grid_stack(tmp.str()),
                             doctest::Contains("projection"),
                             std::exception);
    }
    SUBCASE("misaligned date row names file and row") {
        oracle::TempDir tmp("stack_baddate");
        save_grid_stack(rs, tmp.str());
        std::string csv = slurp(tmp.path / "tp.csv");
        const auto pos = csv.find("2015-01-12");
        REQUIRE(pos != std::string::npos);
        csv.replace(pos, 10, "2015-01-13");
        spit(tmp.path / "tp.csv", csv);
        try {
            load_grid_stack(tmp.str());
            FAIL("expected a throw");
        } catch (const std::exception& e) {
            const std::string msg = e.what();
            CHECK(msg.find("tp.csv") != std::string::npos);
            CHECK(msg.find("2015-01-13") != std::string::npos);
        }
    }
    SUBCASE("non-Monday start date") {
        oracle::TempDir tmp("stack_nonmon");
        RasterSeries bad = rs;
        bad.start_date = Date::from_iso("2015-01-06");
        CHECK_THROWS(save_grid_stack(bad, tmp.str()));
    }
    SUBCASE("missing trailing row") {
        oracle::TempDir tmp("stack_short");
        save_grid_stack(rs, tmp.str());
        std::string csv = slurp(tmp.path / "tmax.csv");
        csv.erase(csv.rfind("2015-02-02"));
        spit(tmp.path / "tmax.csv", csv);
        CHECK_THROWS(load_grid_stack(tmp.str()));
    }
}

TEST_CASE("target series round trip with missing weeks") {
    TargetSeries ts;
    ts.sensor_id = "well_a";
    ts.start_date = Date::from_iso("2015-01-05");
    ts.values = {1.5, std::nullopt, 2.5, std::nullopt, 3.0};
    oracle::TempDir tmp("target");
    const std::string path = (tmp.path / "well_a.csv").string();
    save_target_series(ts, path);
    const TargetSeries back = load_target_series(path);
    CHECK(back.sensor_id == "well_a");
    CHECK(back.start_date == ts.start_date);
    REQUIRE(back.values.size() == 5);
    CHECK(back.values[0] == 1.5);
    CHECK_FALSE(back.values[1].has_value());
    CHECK(back.values[4] == 3.0);
    CHECK(back.n_observed() == 3);
}

TEST_CASE("target loader fills gaps densely and validates") {
    oracle::TempDir tmp("target_rules");

    SUBCASE("weeks absent from the file become missing entries") {
        const std::string p = (tmp.path / "gappy.csv").string();
        spit(p,
             "date,depth_m\n2015-01-05,2.0\n2015-02-02,2.2\n");  // 3-week hole
        const TargetSeries ts = load_target_series(p);
        REQUIRE(ts.values.size() == 5);
        CHECK(ts.values[0] == 2.0);
        CHECK_FALSE(ts.values[1].has_value());
        CHECK_FALSE(ts.values[3].has_value());
        CHECK(ts.values[4] == 2.2);
        CHECK(ts.sensor_id == "gappy");
    }
    SUBCASE("non-increasing dates rejected") {
        const std::string p = (tmp.path / "dup.csv").string();
        spit(p, "date,depth_m\n2015-01-12,2.0\n2015-01-05,2.1\n");
        CHECK_THROWS(load_target_series(p));
    }
    SUBCASE("non-positive depth rejected") {
        const std::string p = (tmp.path / "neg.csv").string();
        spit(p, "date,depth_m\n2015-01-05,-0.5\n2015-01-12,2.0\n");
        CHECK_THROWS(load_target_series(p));
    }
    SUBCASE("non-Monday date rejected") {
        const std::string p = (tmp.path / "tue.csv").string();
        spit(p, "date,depth_m\n2015-01-06,2.0\n");
        CHECK_THROWS(load_target_series(p));
    }
}

TEST_CASE("prediction files validate and round trip") {
    PredictionSeries ps;
    ps.dates = {Date::from_iso("2022-01-03"), Date::from_iso("2022-01-10")};
    ps.mean = {4.25, 4.5};
    ps.stddev = {0.1, 0.0};
    oracle::TempDir tmp("preds");
    const std::string p = (tmp.path / "preds.csv").string();
    write_predictions(ps, p);
    const PredictionSeries back = read_predictions(p);
    REQUIRE(back.dates.size() == 2);
    CHECK(back.dates[1] == ps.dates[1]);
    CHECK(back.mean[0] == 4.25);
    CHECK(back.stddev[1] == 0.0);

    PredictionSeries bad = ps;
    bad.stddev[0] = -0.1;
    CHECK_THROWS(write_predictions(bad, p));
    bad = ps;
    bad.mean.pop_back();
    CHECK_THROWS(write_predictions(bad, p));
}

TEST_CASE("synthetic case is deterministic and shaped correctly") {
    GridGeometry g{7.0, 44.5, 0.125, 6, 6};
    auto [w1, t1] = generate_synthetic_case(42, g, 320);
    auto [w2, t2] = generate_synthetic_case(42, g, 320);
    CHECK(w1.values == w2.values);
    REQUIRE(t1.values.size() == t2.values.size());
    for (std::size_t i = 0; i < t1.values.size(); ++i) {
        CHECK(t1.values[i] == t2.values[i]);
    }

    CHECK(w1.variables == std::vector<std::string>{"tp", "tmax", "tmin"});
    CHECK(w1.n_weeks == 320);
    CHECK(w1.start_date.is_monday());
    // The target needs a full trailing window before its first value.
    for (int i = 0; i < kSynthTrailWeeks; ++i) {
        CHECK_FALSE(t1.values[std::size_t(i)].has_value());
    }
    for (int i = kSynthTrailWeeks; i < 320; ++i) {
        CHECK(t1.values[std::size_t(i)].has_value());
    }

    auto [w3, t3] = generate_synthetic_case(43, g, 320);
    CHECK(w3.values != w1.values);

    CHECK_THROWS(generate_synthetic_case(1, g, 200));
}

TEST_CASE("synthetic target obeys its published law when noise is off") {
    GridGeometry g{7.0, 44.5, 0.125, 5, 5};
    SynthOptions opt;
    opt.target_noise_std = 0.0;
    auto [weather, target] = generate_synthetic_case(9, g, 330, opt);
    const SynthTargetLaw law = synth_target_law();

    // Recompute each target from the weather the generator actually emitted.
    const int cells = g.n_rows * g.n_cols;
    std::vector<double> spatial_mean(std::size_t(weather.n_weeks));
    for (int t = 0; t < weather.n_weeks; ++t) {
        double s = 0.0;
        for (int r = 0; r < g.n_rows; ++r) {
            for (int c = 0; c < g.n_cols; ++c) s += weather.at(t, r, c, 0);
        }
        spatial_mean[std::size_t(t)] = s / cells;
    }
    for (int t = kSynthTrailWeeks; t < weather.n_weeks; ++t) {
        double trail = 0.0;
        for (int u = t - kSynthTrailWeeks; u < t; ++u) {
            trail += spatial_mean[std::size_t(u)];
        }
        trail /= kSynthTrailWeeks;
        const double expected =
            law.intercept + law.weather_coef * trail +
            law.seasonal_amp * std::sin(law.omega * t + law.seasonal_phase);
        REQUIRE(target.values[std::size_t(t)].has_value());
        CHECK(*target.values[std::size_t(t)] ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("synthetic target sits in a plausible depth regime") {
    GridGeometry g{7.0, 44.5, 0.125, 8, 8};
    auto [weather, target] = generate_synthetic_case(1, g, 520);
    std::vector<double> ys;
    for (const auto& v : target.values) {
        if (v) ys.push_back(*v);
    }
    const double m = oracle::mean_of(ys);
    const double s = oracle::pop_std(ys);
    CHECK(m > 3.0);
    CHECK(m < 6.0);
    CHECK(s > 0.3);
    CHECK(s < 1.5);
    for (double y : ys) CHECK(y > 0.0);  // depths stay physical
}
