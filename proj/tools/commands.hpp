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
#include "wtd/seqmods.hpp"
#include "wtd/training.hpp"

namespace wtd::cli {

/// Fully validated description of one run. Parsed from a JSON config file;
/// unknown keys anywhere in the document are rejected.
struct RunConfig {
    std::string weather_dir;  // grid stack directory
    std::string target_csv;   // sensor series
    std::string out_dir;      // all artifacts land here
    std::string sensor;       // defaults to the target file stem
    ModelKind kind = ModelKind::TdcLstm;
    int t_window = 104;
    std::optional<BBox> bbox;
    std::optional<int> square_side;
    Date train_end = Date::from_iso("2016-01-01");
    Date test_start = Date::from_iso("2022-01-01");
    TrainConfig train;
};

RunConfig load_run_config(const std::string& path);

/// Optional command-line overrides applied on top of the config file.
struct Overrides {
    std::optional<std::string> model;
    std::optional<std::string> sensor;
    std::optional<std::uint64_t> seed;
    std::optional<int> ensemble_size;
    std::optional<std::string> out;
};
void apply_overrides(RunConfig& cfg, const Overrides& ov);

struct SynthArgs {
    std::uint64_t seed = 1;
    int weeks = 520;
    int side = 8;
    std::string out;
};

/// Writes `<out>/weather/` (grid stack) and `<out>/synthetic.csv` (target).
void cmd_synth(const SynthArgs& args);

/// Trains the configured ensemble; writes `checkpoints/member_XX.json`,
/// `manifest.json`, and `loss_curves.csv` under cfg.out_dir. Holds the
/// output-directory lock for the duration.
void cmd_train(const RunConfig& cfg);

/// Ensemble-mean evaluation on one split: writes `report_<split>.txt` /
/// `.csv` and `predictions_<split>.csv`, and returns the rendered table.
std::string cmd_evaluate(const RunConfig& cfg, const std::string& checkpoint_dir,
                         const std::string& split);

/// Predictions only (CSV). Returns the output path.
std::string cmd_predict(const RunConfig& cfg, const std::string& checkpoint_dir,
                        const std::string& split);

/// Predictions + hydrograph SVG. Returns the figure path.
std::string cmd_plot(const RunConfig& cfg, const std::string& checkpoint_dir,
                     const std::string& split);

// Helpers shared by commands and exercised directly in tests.
SplitSet split_from_string(const std::string& name);
Ensemble load_ensemble(const std::string& checkpoint_dir);

/// Exclusive advisory lock: creates `<dir>/.wtdcast.lock` (O_EXCL) and
/// removes it on destruction. A live lockfile means another process owns
/// the directory; construction fails then.
class DirLock {
  public:
    explicit DirLock(const std::string& dir);
    ~DirLock();
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

  private:
    std::string path_;
};

}  // namespace wtd::cli
