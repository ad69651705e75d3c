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

#include "wtd/dataio.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "wtd/rng.hpp"

namespace wtd {

namespace fs = std::filesystem;

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& where) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw std::runtime_error(where + ": not a number: '" + s + "'");
    }
    if (!std::isfinite(v)) {
        throw std::runtime_error(where + ": non-finite value '" + s + "'");
    }
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out.good()) throw std::runtime_error("write failed for " + path);
}

}  // namespace

std::size_t TargetSeries::n_observed() const {
    std::size_t n = 0;
    for (const auto& v : values) {
        if (v.has_value()) ++n;
    }
    return n;
}

// ---------------------------------------------------------------------------
// Grid stack
// ---------------------------------------------------------------------------

static std::string grid_header(const GridGeometry& g) {
    std::string h = "date";
    for (int r = 0; r < g.n_rows; ++r) {
        for (int c = 0; c < g.n_cols; ++c) {
            h += ",cell_" + std::to_string(r) + "_" + std::to_string(c);
        }
    }
    return h;
}

RasterSeries load_grid_stack(const std::string& dir) {
    const std::string sidecar_path = (fs::path(dir) / "geometry.json").string();
    std::ifstream sf = open_input(sidecar_path);
    nlohmann::json j = nlohmann::json::parse(sf);
    static const std::set<std::string> kKeys = {
        "origin_lon", "origin_lat", "cell_size", "n_rows",
        "n_cols",     "variables",  "start_date", "n_weeks"};
    for (const auto& item : j.items()) {
        if (!kKeys.count(item.key())) {
            throw std::runtime_error(sidecar_path + ": unknown key '" +
                                     item.key() + "'");
        }
    }
    RasterSeries rs;
    rs.geometry.origin_lon = j.at("origin_lon").get<double>();
    rs.geometry.origin_lat = j.at("origin_lat").get<double>();
    rs.geometry.cell_size = j.at("cell_size").get<double>();
    rs.geometry.n_rows = j.at("n_rows").get<int>();
    rs.geometry.n_cols = j.at("n_cols").get<int>();
    rs.variables = j.at("variables").get<std::vector<std::string>>();
    rs.start_date = Date::from_iso(j.at("start_date").get<std::string>());
    rs.n_weeks = j.at("n_weeks").get<int>();

    if (rs.geometry.cell_size <= 0 || rs.geometry.n_rows < 1 ||
        rs.geometry.n_cols < 1 || rs.n_weeks < 1 || rs.variables.empty()) {
        throw std::runtime_error(sidecar_path + ": invalid geometry");
    }
    {
        std::set<std::string> uniq(rs.variables.begin(), rs.variables.end());
        if (uniq.size() != rs.variables.size()) {
            throw std::runtime_error(sidecar_path + ": duplicate variable names");
        }
    }
    if (!rs.start_date.is_monday()) {
        throw std::runtime_error(sidecar_path +
                                 ": start_date must be a Monday (week start)");
    }

    const int cells = rs.geometry.n_rows * rs.geometry.n_cols;
    rs.values.assign(std::size_t(rs.n_weeks) * cells * rs.variables.size(),
                     0.0);
    const std::string expected_header = grid_header(rs.geometry);
    for (std::size_t p = 0; p < rs.variables.size(); ++p) {
        const std::string path =
            (fs::path(dir) / (rs.variables[p] + ".csv")).string();
        std::ifstream in = open_input(path);
        std::string line;
        if (!std::getline(in, line) ||
            split_csv_line(line) != split_csv_line(expected_header)) {
            throw std::runtime_error(path + ": bad header; expected '" +
                                     expected_header + "'");
        }
        for (int t = 0; t < rs.n_weeks; ++t) {
            if (!std::getline(in, line)) {
                throw std::runtime_error(path + ": ends at row " +
                                         std::to_string(t + 1) + ", expected " +
                                         std::to_string(rs.n_weeks) +
                                         " data rows");
            }
            const auto fields = split_csv_line(line);
            const std::string where = path + ":" + std::to_string(t + 2);
            if (int(fields.size()) != cells + 1) {
                throw std::runtime_error(where + ": expected " +
                                         std::to_string(cells + 1) + " fields");
            }
            const Date expected = rs.start_date.plus_weeks(t);
            if (Date::from_iso(fields[0]) != expected) {
                throw std::runtime_error(where + ": timestamp misalignment (" +
                                         fields[0] + " vs expected " +
                                         expected.to_iso() + ")");
            }
            for (int cell = 0; cell < cells; ++cell) {
                const int r = cell / rs.geometry.n_cols;
                const int c = cell % rs.geometry.n_cols;
                rs.at(t, r, c, int(p)) = parse_double(fields[cell + 1], where);
            }
        }
        if (std::getline(in, line) && !line.empty()) {
            throw std::runtime_error(path + ": extra rows beyond n_weeks");
        }
    }
    return rs;
}

void save_grid_stack(const RasterSeries& rs, const std::string& dir) {
    if (!rs.start_date.is_monday()) {
        throw std::runtime_error(
            "save_grid_stack: start_date must be a Monday (week start)");
    }
    fs::create_directories(dir);
    {
        nlohmann::json j;
        j["origin_lon"] = rs.geometry.origin_lon;
        j["origin_lat"] = rs.geometry.origin_lat;
        j["cell_size"] = rs.geometry.cell_size;
        j["n_rows"] = rs.geometry.n_rows;
        j["n_cols"] = rs.geometry.n_cols;
        j["variables"] = rs.variables;
        j["start_date"] = rs.start_date.to_iso();
        j["n_weeks"] = rs.n_weeks;
        const std::string path = (fs::path(dir) / "geometry.json").string();
        std::ofstream out = open_output(path);
        out << j.dump(2) << '\n';
        finish_output(out, path);
    }
    for (std::size_t p = 0; p < rs.variables.size(); ++p) {
        const std::string path =
            (fs::path(dir) / (rs.variables[p] + ".csv")).string();
        std::ofstream out = open_output(path);
        out << grid_header(rs.geometry) << '\n';
        for (int t = 0; t < rs.n_weeks; ++t) {
            out << rs.week_date(t).to_iso();
            for (int r = 0; r < rs.geometry.n_rows; ++r) {
                for (int c = 0; c < rs.geometry.n_cols; ++c) {
                    out << ',' << fmt_double(rs.at(t, r, c, int(p)));
                }
            }
            out << '\n';
        }
        finish_output(out, path);
    }
}

// ---------------------------------------------------------------------------
// Target series
// ---------------------------------------------------------------------------

TargetSeries load_target_series(const std::string& csv_path) {
    std::ifstream in = open_input(csv_path);
    std::string line;
    if (!std::getline(in, line) ||
        split_csv_line(line) != std::vector<std::string>{"date", "depth_m"}) {
        throw std::runtime_error(csv_path +
                                 ": bad header; expected 'date,depth_m'");
    }
    std::vector<Date> dates;
    std::vector<std::optional<double>> vals;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string where = csv_path + ":" + std::to_string(row);
        if (fields.size() != 2) {
            throw std::runtime_error(where + ": expected 2 fields");
        }
        const Date d = Date::from_iso(fields[0]);
        if (!d.is_monday()) {
            throw std::runtime_error(where +
                                     ": dates must be Mondays (week starts)");
        }
        if (!dates.empty() && !(dates.back() < d)) {
            throw std::runtime_error(where + ": timestamps not increasing");
        }
        dates.push_back(d);
        if (fields[1].empty()) {
            vals.push_back(std::nullopt);
        } else {
            const double v = parse_double(fields[1], where);
            if (v <= 0.0) {
                throw std::runtime_error(
                    where + ": depth must be positive meters, got " +
                    fields[1]);
            }
            vals.push_back(v);
        }
    }
    if (dates.empty()) {
        throw std::runtime_error(csv_path + ": no data rows");
    }
    TargetSeries ts;
    ts.sensor_id = fs::path(csv_path).stem().string();
    ts.start_date = dates.front();
    const long span = dates.front().days_until(dates.back()) / 7 + 1;
    ts.values.assign(std::size_t(span), std::nullopt);
    for (std::size_t i = 0; i < dates.size(); ++i) {
        ts.values[std::size_t(ts.start_date.days_until(dates[i]) / 7)] =
            vals[i];
    }
    return ts;
}

void save_target_series(const TargetSeries& ts, const std::string& csv_path) {
    std::ofstream out = open_output(csv_path);
    out << "date,depth_m\n";
    for (int t = 0; t < ts.n_weeks(); ++t) {
        out << ts.week_date(t).to_iso() << ',';
        if (ts.values[t]) out << fmt_double(*ts.values[t]);
        out << '\n';
    }
    finish_output(out, csv_path);
}

// ---------------------------------------------------------------------------
// Predictions
// ---------------------------------------------------------------------------

void write_predictions(const PredictionSeries& preds, const std::string& path) {
    if (preds.dates.size() != preds.mean.size() ||
        preds.dates.size() != preds.stddev.size()) {
        throw std::invalid_argument("write_predictions: column length mismatch");
    }
    for (double s : preds.stddev) {
        if (!(s >= 0.0)) {
            throw std::invalid_argument(
                "write_predictions: ensemble std must be >= 0");
        }
    }
    std::ofstream out = open_output(path);
    out << "date,ensemble_mean_m,ensemble_std_m\n";
    for (std::size_t i = 0; i < preds.dates.size(); ++i) {
        out << preds.dates[i].to_iso() << ',' << fmt_double(preds.mean[i])
            << ',' << fmt_double(preds.stddev[i]) << '\n';
    }
    finish_output(out, path);
}

PredictionSeries read_predictions(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line) ||
        split_csv_line(line) != std::vector<std::string>{
                                    "date", "ensemble_mean_m",
                                    "ensemble_std_m"}) {
        throw std::runtime_error(path + ": bad predictions header");
    }
    PredictionSeries p;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string where = path + ":" + std::to_string(row);
        if (fields.size() != 3) {
            throw std::runtime_error(where + ": expected 3 fields");
        }
        p.dates.push_back(Date::from_iso(fields[0]));
        p.mean.push_back(parse_double(fields[1], where));
        const double s = parse_double(fields[2], where);
        if (s < 0.0) {
            throw std::runtime_error(where + ": negative ensemble std");
        }
        p.stddev.push_back(s);
    }
    return p;
}

// ---------------------------------------------------------------------------
// Synthetic case
// ---------------------------------------------------------------------------

namespace synth {

// Radians per week of the annual cycle.
constexpr double kOmega = 2.0 * M_PI * 7.0 / 365.25;

// Per-channel climate: level, seasonal amplitude, seasonal phase, AR(1)
// anomaly innovation std, smoothed week-noise std, north-south and
// west-east gradient spans.
constexpr double kMean[3] = {2.5, 18.0, 8.0};
constexpr double kAmp[3] = {0.8, 10.0, 9.0};
constexpr double kPhase[3] = {0.0, -M_PI / 2, -M_PI / 2};
constexpr double kAnomSigma[3] = {0.35, 0.9, 0.9};
constexpr double kNoiseSigma[3] = {0.5, 1.5, 1.5};
constexpr double kGradRow[3] = {0.4, -2.0, -2.0};
constexpr double kGradCol[3] = {0.2, 1.0, 1.0};
constexpr double kAnomRho = 0.9;

// Target law: intercept + coef * (trailing 26-week mean of channel 0's
// spatial mean) + seasonal_amp * sin(omega*t + seasonal_phase) + noise.
// The seasonal phase matches the 26-week window's lag (13.5 weeks) so the
// calendar term reinforces the weather-borne cycle.
constexpr double kIntercept = 2.4;
constexpr double kWeatherCoef = 0.8;
constexpr double kSeasonalAmp = 0.366;
constexpr double kSeasonalPhase = -13.5 * kOmega;

}  // namespace synth

SynthTargetLaw synth_target_law() {
    return {synth::kIntercept, synth::kWeatherCoef, synth::kSeasonalAmp,
            synth::kSeasonalPhase, synth::kOmega};
}

std::pair<RasterSeries, TargetSeries> generate_synthetic_case(
    std::uint64_t seed, const GridGeometry& geometry, int n_weeks,
    const SynthOptions& options) {
    if (geometry.n_rows < 1 || geometry.n_cols < 1 || geometry.cell_size <= 0) {
        throw std::invalid_argument("generate_synthetic_case: bad geometry");
    }
    if (n_weeks < 312) {
        throw std::invalid_argument(
            "generate_synthetic_case: n_weeks must be >= 312 (three default "
            "104-week windows), got " +
            std::to_string(n_weeks));
    }
    const int R = geometry.n_rows;
    const int C = geometry.n_cols;
    constexpr int P = 3;

    RasterSeries rs;
    rs.geometry = geometry;
    rs.variables = {"tp", "tmax", "tmin"};
    rs.start_date = Date::from_ymd(2014, 1, 6);
    rs.n_weeks = n_weeks;
    rs.values.assign(std::size_t(n_weeks) * R * C * P, 0.0);

    Rng rng(seed);

    // Slow anomalies, one AR(1) per channel, shared by all cells of a week.
    std::vector<std::vector<double>> anom(P, std::vector<double>(n_weeks));
    for (int p = 0; p < P; ++p) {
        double a = 0.0;
        for (int t = 0; t < n_weeks; ++t) {
            a = synth::kAnomRho * a + rng.normal(0.0, synth::kAnomSigma[p]);
            anom[p][t] = a;
        }
    }

    // Weekly fields: seasonal + anomaly + fixed gradient + smoothed noise.
    std::vector<double> raw(std::size_t(R) * C);
    auto frac = [](int i, int n) {
        return n > 1 ? double(i) / (n - 1) - 0.5 : 0.0;
    };
    for (int t = 0; t < n_weeks; ++t) {
        for (int p = 0; p < P; ++p) {
            for (double& v : raw) v = rng.normal(0.0, synth::kNoiseSigma[p]);
            const double seasonal =
                synth::kMean[p] +
                synth::kAmp[p] * std::sin(synth::kOmega * t + synth::kPhase[p]);
            for (int r = 0; r < R; ++r) {
                for (int c = 0; c < C; ++c) {
                    // 3x3 box smoothing, clipped at the borders.
                    double sum = 0.0;
                    int cnt = 0;
                    for (int dr = -1; dr <= 1; ++dr) {
                        for (int dc = -1; dc <= 1; ++dc) {
                            const int rr = r + dr, cc = c + dc;
                            if (rr < 0 || rr >= R || cc < 0 || cc >= C) continue;
                            sum += raw[std::size_t(rr) * C + cc];
                            ++cnt;
                        }
                    }
                    const double grad = synth::kGradRow[p] * frac(r, R) +
                                        synth::kGradCol[p] * frac(c, C);
                    rs.at(t, r, c, p) =
                        seasonal + anom[p][t] + grad + sum / cnt;
                }
            }
        }
    }

    // Target: trailing 26-week mean of channel 0's spatial mean.
    TargetSeries ts;
    ts.sensor_id = "synthetic";
    ts.start_date = rs.start_date;
    ts.values.assign(std::size_t(n_weeks), std::nullopt);
    std::vector<double> spatial_mean(n_weeks);
    const double inv_cells = 1.0 / (double(R) * C);
    for (int t = 0; t < n_weeks; ++t) {
        double s = 0.0;
        for (int r = 0; r < R; ++r) {
            for (int c = 0; c < C; ++c) s += rs.at(t, r, c, 0);
        }
        spatial_mean[t] = s * inv_cells;
    }
    for (int t = kSynthTrailWeeks; t < n_weeks; ++t) {
        double w = 0.0;
        for (int u = t - kSynthTrailWeeks; u < t; ++u) w += spatial_mean[u];
        w /= kSynthTrailWeeks;
        double y = synth::kIntercept + synth::kWeatherCoef * w +
                   synth::kSeasonalAmp *
                       std::sin(synth::kOmega * t + synth::kSeasonalPhase);
        if (options.target_noise_std > 0.0) {
            y += rng.normal(0.0, options.target_noise_std);
        }
        ts.values[t] = y;
    }
    return {std::move(rs), std::move(ts)};
}

}  // namespace wtd
