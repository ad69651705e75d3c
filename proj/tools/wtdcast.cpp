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

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

struct CommonFlags {
    std::string config;
    wtd::cli::Overrides overrides;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config, "run configuration file (JSON)")
        ->required();
    cmd->add_option("--model", flags.overrides.model,
                    "override model kind: tdc-lstm or tdc-unpwavenet");
    cmd->add_option("--sensor", flags.overrides.sensor, "override sensor id");
    cmd->add_option("--seed", flags.overrides.seed,
                    "override base seed (clears any explicit seed list)");
    cmd->add_option("--ensemble-size", flags.overrides.ensemble_size,
                    "override ensemble size");
    cmd->add_option("--out", flags.overrides.out, "override output directory");
}

wtd::cli::RunConfig resolve(const CommonFlags& flags) {
    wtd::cli::RunConfig cfg = wtd::cli::load_run_config(flags.config);
    wtd::cli::apply_overrides(cfg, flags.overrides);
    return cfg;
}

std::string default_checkpoint_dir(const wtd::cli::RunConfig& cfg,
                                   const std::string& given) {
    return given.empty() ? cfg.out_dir + "/checkpoints" : given;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "wtdcast: weekly water-table depth forecasting from gridded weather"};
    app.require_subcommand(1);

    wtd::cli::SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand(
        "synth", "generate a synthetic weather stack + target series");
    synth->add_option("--seed", synth_args.seed, "generator seed");
    synth->add_option("--weeks", synth_args.weeks, "number of weekly steps");
    synth->add_option("--side", synth_args.side, "grid side length (cells)");
    synth->add_option("--out", synth_args.out, "output directory")->required();

    CommonFlags train_flags;
    CLI::App* train =
        app.add_subcommand("train", "train the configured ensemble");
    add_common(train, train_flags);

    CommonFlags eval_flags;
    std::string eval_ckpt, eval_split = "test";
    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "score the ensemble mean on one split");
    add_common(evaluate, eval_flags);
    evaluate->add_option("--checkpoint-dir", eval_ckpt,
                         "checkpoint directory (default <out>/checkpoints)");
    evaluate->add_option("--split", eval_split, "train, val, or test");

    CommonFlags pred_flags;
    std::string pred_ckpt, pred_split = "test";
    CLI::App* predict =
        app.add_subcommand("predict", "write per-date ensemble mean/std");
    add_common(predict, pred_flags);
    predict->add_option("--checkpoint-dir", pred_ckpt,
                        "checkpoint directory (default <out>/checkpoints)");
    predict->add_option("--split", pred_split, "train, val, or test");

    CommonFlags plot_flags;
    std::string plot_ckpt, plot_split = "test";
    CLI::App* plot =
        app.add_subcommand("plot", "write predictions and a hydrograph SVG");
    add_common(plot, plot_flags);
    plot->add_option("--checkpoint-dir", plot_ckpt,
                     "checkpoint directory (default <out>/checkpoints)");
    plot->add_option("--split", plot_split, "train, val, or test");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            wtd::cli::cmd_synth(synth_args);
            std::cout << "synthetic case written to " << synth_args.out << "\n";
        } else if (train->parsed()) {
            const auto cfg = resolve(train_flags);
            wtd::cli::cmd_train(cfg);
            std::cout << "ensemble trained; artifacts in " << cfg.out_dir
                      << "\n";
        } else if (evaluate->parsed()) {
            const auto cfg = resolve(eval_flags);
            std::cout << wtd::cli::cmd_evaluate(
                cfg, default_checkpoint_dir(cfg, eval_ckpt), eval_split);
        } else if (predict->parsed()) {
            const auto cfg = resolve(pred_flags);
            std::cout << wtd::cli::cmd_predict(
                             cfg, default_checkpoint_dir(cfg, pred_ckpt),
                             pred_split)
                      << "\n";
        } else if (plot->parsed()) {
            const auto cfg = resolve(plot_flags);
            std::cout << wtd::cli::cmd_plot(
                             cfg, default_checkpoint_dir(cfg, plot_ckpt),
                             plot_split)
                      << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
