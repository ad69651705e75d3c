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

#include "commands.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "wtd/dataio.hpp"
#include "wtd/metrics.hpp"
#include "wtd/plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace wtd::cli {

namespace {

void reject_unknown_keys(const json& j, const std::string& where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed) {
            if (item.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw std::invalid_argument("config: unknown key '" + item.key() +
                                        "' in " + where);
        }
    }
}

const json& require(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw std::invalid_argument("config: missing required key '" +
                                    std::string(key) + "' in " + where);
    }
    return *it;
}

TrainConfig train_config_from_json(const json& j) {
    reject_unknown_keys(j, "train",
                        {"learning_rate", "l2", "momentum", "epochs",
                         "batch_size", "clipnorm", "dropout", "ensemble_size",
                         "base_seed", "seeds", "threads"});
    TrainConfig t;
    if (j.contains("learning_rate")) t.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("l2")) t.l2 = j["l2"].get<double>();
    if (j.contains("momentum")) t.momentum = j["momentum"].get<double>();
    if (j.contains("epochs")) t.epochs = j["epochs"].get<int>();
    if (j.contains("batch_size")) t.batch_size = j["batch_size"].get<int>();
    if (j.contains("clipnorm")) t.clipnorm = j["clipnorm"].get<double>();
    if (j.contains("dropout")) t.dropout = j["dropout"].get<double>();
    if (j.contains("ensemble_size")) t.ensemble_size = j["ensemble_size"].get<int>();
    if (j.contains("base_seed")) t.base_seed = j["base_seed"].get<std::uint64_t>();
    if (j.contains("seeds")) t.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("threads")) t.threads = j["threads"].get<int>();
    return t;
}

json train_config_to_json(const TrainConfig& t) {
    json j;
    j["learning_rate"] = t.learning_rate;
    j["l2"] = t.l2;
    j["momentum"] = t.momentum;
    j["epochs"] = t.epochs;
    j["batch_size"] = t.batch_size;
    j["clipnorm"] = t.clipnorm;
    j["dropout"] = t.dropout;
    j["ensemble_size"] = t.ensemble_size;
    j["base_seed"] = t.base_seed;
    j["seeds"] = t.seeds;
    j["threads"] = t.threads;
    return j;
}

json run_config_to_json(const RunConfig& cfg) {
    json j;
    j["weather_dir"] = cfg.weather_dir;
    j["target_csv"] = cfg.target_csv;
    j["out_dir"] = cfg.out_dir;
    j["sensor"] = cfg.sensor;
    j["model"] = to_string(cfg.kind);
    j["t_window"] = cfg.t_window;
    if (cfg.bbox) {
        j["bbox"] = {{"lon_min", cfg.bbox->lon_min},
                     {"lat_min", cfg.bbox->lat_min},
                     {"lon_max", cfg.bbox->lon_max},
                     {"lat_max", cfg.bbox->lat_max}};
    } else {
        j["bbox"] = nullptr;
    }
    if (cfg.square_side) j["square_side"] = *cfg.square_side;
    else j["square_side"] = nullptr;
    j["train_end"] = cfg.train_end.to_iso();
    j["test_start"] = cfg.test_start.to_iso();
    j["train"] = train_config_to_json(cfg.train);
    return j;
}

AssembleOptions assemble_options(const RunConfig& cfg) {
    AssembleOptions opt;
    opt.bbox = cfg.bbox;
    opt.square_side = cfg.square_side;
    opt.train_end = cfg.train_end;
    opt.test_start = cfg.test_start;
    opt.t_window = cfg.t_window;
    return opt;
}

WindowedDataset load_and_assemble(const RunConfig& cfg) {
    if (!fs::exists(cfg.weather_dir)) {
        throw std::runtime_error("weather directory not found: " +
                                 cfg.weather_dir);
    }
    if (!fs::exists(cfg.target_csv)) {
        throw std::runtime_error("target file not found: " + cfg.target_csv);
    }
    RasterSeries weather = load_grid_stack(cfg.weather_dir);
    TargetSeries target = load_target_series(cfg.target_csv);
    return assemble_dataset(weather, target, assemble_options(cfg));
}

std::string member_name(int k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "member_%02d.json", k);
    return std::string(buf);
}

std::string iso_timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf);
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config " + path + ": " + e.what());
    }
    reject_unknown_keys(j, "the top level",
                        {"weather_dir", "target_csv", "out_dir", "sensor",
                         "model", "t_window", "bbox", "square_side",
                         "train_end", "test_start", "train"});

    RunConfig cfg;
    cfg.weather_dir = require(j, "weather_dir", "the top level").get<std::string>();
    cfg.target_csv = require(j, "target_csv", "the top level").get<std::string>();
    cfg.out_dir = require(j, "out_dir", "the top level").get<std::string>();
    cfg.kind = model_kind_from_string(
        require(j, "model", "the top level").get<std::string>());
    if (j.contains("sensor")) {
        cfg.sensor = j["sensor"].get<std::string>();
    } else {
        cfg.sensor = fs::path(cfg.target_csv).stem().string();
    }
    if (j.contains("t_window")) cfg.t_window = j["t_window"].get<int>();
    if (cfg.t_window < 1) {
        throw std::invalid_argument("config: t_window must be >= 1");
    }
    if (j.contains("bbox") && !j["bbox"].is_null()) {
        const json& b = j["bbox"];
        reject_unknown_keys(b, "bbox",
                            {"lon_min", "lat_min", "lon_max", "lat_max"});
        BBox box;
        box.lon_min = require(b, "lon_min", "bbox").get<double>();
        box.lat_min = require(b, "lat_min", "bbox").get<double>();
        box.lon_max = require(b, "lon_max", "bbox").get<double>();
        box.lat_max = require(b, "lat_max", "bbox").get<double>();
        cfg.bbox = box;
    }
    if (j.contains("square_side") && !j["square_side"].is_null()) {
        cfg.square_side = j["square_side"].get<int>();
    }
    if (j.contains("train_end")) {
        cfg.train_end = Date::from_iso(j["train_end"].get<std::string>());
    }
    if (j.contains("test_start")) {
        cfg.test_start = Date::from_iso(j["test_start"].get<std::string>());
    }
    if (j.contains("train")) cfg.train = train_config_from_json(j["train"]);
    if (!(cfg.train_end < cfg.test_start)) {
        throw std::invalid_argument(
            "config: train_end must precede test_start");
    }
    return cfg;
}

void apply_overrides(RunConfig& cfg, const Overrides& ov) {
    if (ov.model) cfg.kind = model_kind_from_string(*ov.model);
    if (ov.sensor) cfg.sensor = *ov.sensor;
    if (ov.seed) {
        cfg.train.base_seed = *ov.seed;
        cfg.train.seeds.clear();
    }
    if (ov.ensemble_size) {
        cfg.train.ensemble_size = *ov.ensemble_size;
        cfg.train.seeds.clear();
    }
    if (ov.out) cfg.out_dir = *ov.out;
}

SplitSet split_from_string(const std::string& name) {
    if (name == "train") return SplitSet::Train;
    if (name == "val") return SplitSet::Val;
    if (name == "test") return SplitSet::Test;
    throw std::invalid_argument("unknown split '" + name +
                                "' (expected train, val, or test)");
}

DirLock::DirLock(const std::string& dir) {
    fs::create_directories(dir);
    path_ = (fs::path(dir) / ".wtdcast.lock").string();
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        throw std::runtime_error(
            "output directory is locked (another process?): " + path_ +
            " — remove the file if it is stale");
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    // Best effort; the lock is the file's existence, not its content.
    (void)!::write(fd, pid.c_str(), pid.size());
    ::close(fd);
}

DirLock::~DirLock() { ::unlink(path_.c_str()); }

void cmd_synth(const SynthArgs& args) {
    if (args.weeks < 3 * 104) {
        throw std::invalid_argument(
            "--weeks " + std::to_string(args.weeks) +
            " is too short: the synthetic case needs at least 312 weeks "
            "(three 104-week input windows) to yield usable train/val/test "
            "splits");
    }
    if (args.side < 5) {
        throw std::invalid_argument("--side must be >= 5 (encoder minimum)");
    }
    GridGeometry geom;
    geom.origin_lon = 7.0;
    geom.origin_lat = 44.5;
    geom.cell_size = 0.125;
    geom.n_rows = args.side;
    geom.n_cols = args.side;

    auto [weather, target] = generate_synthetic_case(args.seed, geom, args.weeks);
    fs::create_directories(fs::path(args.out) / "weather");
    save_grid_stack(weather, (fs::path(args.out) / "weather").string());
    save_target_series(target, (fs::path(args.out) / "synthetic.csv").string());
}

void cmd_train(const RunConfig& cfg) {
    DirLock lock(cfg.out_dir);
    const auto t0 = std::chrono::steady_clock::now();

    WindowedDataset data = load_and_assemble(cfg);
    const ModelConfig defaults = make_default_config(cfg.kind);
    ModelConfig mc = defaults;
    mc.t_window = cfg.t_window;
    mc.rows = data.weather.geometry.n_rows;
    mc.cols = data.weather.geometry.n_cols;
    mc.channels = int(data.weather.variables.size());
    // The frozen totals hold only for the reference input shape (window and
    // channel count); other shapes legitimately change the count.
    if (mc.t_window != defaults.t_window || mc.channels != defaults.channels) {
        mc.expected_param_total.reset();
    }
    Ensemble ens = train_ensemble(data, mc, cfg.train);

    const fs::path ckpt_dir = fs::path(cfg.out_dir) / "checkpoints";
    fs::create_directories(ckpt_dir);
    for (std::size_t k = 0; k < ens.members.size(); ++k) {
        save_checkpoint(ens.members[k].model,
                        (ckpt_dir / member_name(int(k))).string());
    }

    // Loss curves, one row per member x epoch.
    {
        std::ofstream out(fs::path(cfg.out_dir) / "loss_curves.csv");
        if (!out) throw std::runtime_error("cannot write loss_curves.csv");
        out << "member,seed,epoch,train_mse,val_mse\n";
        char buf[64];
        for (std::size_t k = 0; k < ens.members.size(); ++k) {
            const auto& h = ens.members[k].history;
            for (std::size_t e = 0; e < h.train_mse.size(); ++e) {
                out << k << ',' << ens.members[k].seed << ',' << e + 1 << ',';
                std::snprintf(buf, sizeof(buf), "%.17g", h.train_mse[e]);
                out << buf << ',';
                if (e < h.val_mse.size()) {
                    std::snprintf(buf, sizeof(buf), "%.17g", h.val_mse[e]);
                    out << buf;
                }
                out << '\n';
            }
        }
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    json manifest;
    manifest["command"] = "train";
    manifest["created"] = iso_timestamp_now();
    manifest["config"] = run_config_to_json(cfg);
    manifest["parameter_count"] =
        ens.members.empty() ? 0 : count_parameters(ens.members[0].model.params);
    json members = json::array();
    for (const auto& m : ens.members) {
        json jm;
        jm["seed"] = m.seed;
        jm["initial_train_mse"] = m.history.initial_train_mse;
        jm["final_train_mse"] = m.history.final_train_mse;
        jm["final_val_mse"] =
            m.history.val_mse.empty() ? json(nullptr) : json(m.history.val_mse.back());
        members.push_back(jm);
    }
    manifest["members"] = members;
    manifest["wall_clock_seconds"] = wall;
    std::ofstream mf(fs::path(cfg.out_dir) / "manifest.json");
    if (!mf) throw std::runtime_error("cannot write manifest.json");
    mf << manifest.dump(2) << '\n';
}

Ensemble load_ensemble(const std::string& checkpoint_dir) {
    if (!fs::is_directory(checkpoint_dir)) {
        throw std::runtime_error("checkpoint directory not found: " +
                                 checkpoint_dir);
    }
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(checkpoint_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("member_", 0) == 0 && entry.path().extension() == ".json") {
            names.push_back(entry.path().string());
        }
    }
    if (names.empty()) {
        throw std::runtime_error("no member_*.json checkpoints in " +
                                 checkpoint_dir);
    }
    std::sort(names.begin(), names.end());
    Ensemble ens;
    for (const auto& path : names) {
        EnsembleMember m;
        m.model = load_checkpoint(path);
        ens.members.push_back(std::move(m));
    }
    for (const auto& m : ens.members) {
        if (m.model.config.kind != ens.members[0].model.config.kind) {
            throw std::runtime_error(
                "checkpoint directory mixes model kinds: " + checkpoint_dir);
        }
    }
    return ens;
}

std::string cmd_predict(const RunConfig& cfg, const std::string& checkpoint_dir,
                        const std::string& split) {
    DirLock lock(cfg.out_dir);
    const SplitSet set = split_from_string(split);
    WindowedDataset data = load_and_assemble(cfg);
    Ensemble ens = load_ensemble(checkpoint_dir);
    PredictionSeries preds = ensemble_predict(ens, data, set);
    const std::string path =
        (fs::path(cfg.out_dir) / ("predictions_" + split + ".csv")).string();
    write_predictions(preds, path);
    return path;
}

std::string cmd_evaluate(const RunConfig& cfg, const std::string& checkpoint_dir,
                         const std::string& split) {
    DirLock lock(cfg.out_dir);
    const SplitSet set = split_from_string(split);
    WindowedDataset data = load_and_assemble(cfg);
    Ensemble ens = load_ensemble(checkpoint_dir);

    PredictionSeries preds = ensemble_predict(ens, data, set);
    const std::vector<double> y = set_targets_m(data, set);

    EvaluationReport report = compute_metrics(preds.mean, y, data.stats);
    report.sensor_id = cfg.sensor;
    report.model_kind = to_string(ens.members[0].model.config.kind);
    report.split_name = split;

    const std::string table = render_report_table({report});
    {
        std::ofstream out(fs::path(cfg.out_dir) / ("report_" + split + ".txt"));
        if (!out) throw std::runtime_error("cannot write report table");
        out << table;
    }
    write_report_csv(
        {report},
        (fs::path(cfg.out_dir) / ("report_" + split + ".csv")).string());
    write_predictions(
        preds,
        (fs::path(cfg.out_dir) / ("predictions_" + split + ".csv")).string());
    return table;
}

std::string cmd_plot(const RunConfig& cfg, const std::string& checkpoint_dir,
                     const std::string& split) {
    DirLock lock(cfg.out_dir);
    const SplitSet set = split_from_string(split);
    WindowedDataset data = load_and_assemble(cfg);
    Ensemble ens = load_ensemble(checkpoint_dir);

    PredictionSeries preds = ensemble_predict(ens, data, set);
    write_predictions(
        preds,
        (fs::path(cfg.out_dir) / ("predictions_" + split + ".csv")).string());

    PredictionPlot plot;
    plot.title = cfg.sensor + " | " +
                 to_string(ens.members[0].model.config.kind) + " | " + split;
    plot.dates = preds.dates;
    plot.observed = set_targets_m(data, set);
    plot.mean = preds.mean;
    plot.stddev = preds.stddev;
    const std::string path =
        (fs::path(cfg.out_dir) / ("figure_" + split + ".svg")).string();
    write_prediction_svg(plot, path);
    return path;
}

}  // namespace wtd::cli
