// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: train / eval / stream / ablate / gen-data.
// Exit codes: 0 success, 1 validation error (bad config, bad arguments),
// 2 runtime failure (I/O, numeric aborts).

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lapnet/lapnet.hpp"

namespace fs = std::filesystem;
using namespace lapnet;

namespace {

struct CommonArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string checkpoint;
};

RunConfig load_run_config(const CommonArgs& args) {
    RunConfig cfg = args.config.empty() ? RunConfig{} : RunConfig::load(args.config);
    if (args.seed.has_value()) cfg.seed = *args.seed;
    if (!args.out.empty()) cfg.out_dir = args.out;
    cfg.validate();
    return cfg;
}

int run_train(const CommonArgs& args, const std::string& resume_from) {
    RunConfig cfg = load_run_config(args);
    if (cfg.manifest.empty()) throw ConfigError("train needs a dataset manifest");
    Manifest manifest = Manifest::load(cfg.manifest);
    std::vector<FeatureSequence> data = manifest.load_split("train");

    fs::create_directories(cfg.out_dir);
    std::optional<Trainer> trainer;
    if (!resume_from.empty()) {
        Checkpoint ck = load_checkpoint(resume_from);
        trainer.emplace(ck, std::move(data));
    } else {
        trainer.emplace(cfg, std::move(data));
    }

    std::ofstream log(fs::path(cfg.out_dir) / "train_log.csv",
                      resume_from.empty() ? std::ios::trunc : std::ios::app);
    if (!log) throw Error("cannot open training log for writing");
    if (resume_from.empty()) log << training_log_header() << '\n';
    trainer->train([&](const EpochLog& row) {
        log << training_log_row(row) << '\n';
        log.flush();
        std::cout << "epoch " << row.epoch << "  cls " << format_double(row.loss_cls)
                  << "  pre " << format_double(row.loss_pre) << "  total "
                  << format_double(row.loss_total) << "  tau "
                  << format_double(row.temperature) << '\n';
    });
    fs::path ck_path = args.checkpoint.empty()
                           ? fs::path(cfg.out_dir) / "final.lapc"
                           : fs::path(args.checkpoint);
    trainer->save(ck_path);
    cfg.save(fs::path(cfg.out_dir) / "config.json");
    std::cout << "checkpoint written to " << ck_path.string() << '\n';
    return 0;
}

int run_eval(const CommonArgs& args, const std::string& manifest_path,
             const std::string& split) {
    if (args.checkpoint.empty()) throw ConfigError("eval needs --checkpoint");
    Checkpoint ck = load_checkpoint(args.checkpoint);
    std::string manifest_file =
        !manifest_path.empty() ? manifest_path : ck.run.manifest;
    if (manifest_file.empty()) throw ConfigError("eval needs a dataset manifest");
    Manifest manifest = Manifest::load(manifest_file);
    std::vector<FeatureSequence> data = manifest.load_split(split);

    fs::path out_dir = args.out.empty() ? fs::path(ck.run.out_dir) : fs::path(args.out);
    fs::create_directories(out_dir);
    EvalOutcome outcome = evaluate_model(ck.params, data);
    write_metrics_json(out_dir / "metrics.json", outcome);
    write_per_frame_csv(out_dir / "per_frame.csv", outcome,
                        ck.params.config.num_classes);
    std::cout << "frames " << outcome.total_frames << "  mAP "
              << format_double(outcome.detection.map) << "  mcAP "
              << format_double(outcome.detection.mcap) << '\n';
    return 0;
}

int run_stream(const CommonArgs& args, const std::string& input) {
    if (args.checkpoint.empty()) throw ConfigError("stream needs --checkpoint");
    if (input.empty()) throw ConfigError("stream needs an input file");
    Checkpoint ck = load_checkpoint(args.checkpoint);
    FeatureSequence seq = load_sequence(input);
    SingleFrameReader reader(seq);
    drive_stream(ck.params, reader,
                 [&](std::size_t index, std::size_t frames_read,
                     const std::vector<double>& probs) {
                     if (frames_read != index + 1)
                         throw ContractError("stream lookahead detected");
                     std::cout << index;
                     for (double p : probs) std::cout << ',' << format_double(p);
                     std::cout << '\n';
                 });
    return 0;
}

int run_ablate(const CommonArgs& args, const std::string& sweep,
               std::vector<std::size_t> values, std::size_t num_seeds) {
    RunConfig cfg = load_run_config(args);
    if (cfg.manifest.empty()) throw ConfigError("ablate needs a dataset manifest");
    Manifest manifest = Manifest::load(cfg.manifest);
    std::vector<FeatureSequence> train_data = manifest.load_split("train");
    std::vector<FeatureSequence> test_data = manifest.load_split("test");

    SweepSpec spec;
    if (sweep == "afs") {
        spec.kind = SweepKind::afs_on_off;
    } else if (sweep == "window") {
        spec.kind = SweepKind::window_size;
        spec.values = std::move(values);
    } else if (sweep == "states") {
        spec.kind = SweepKind::states;
        spec.values = std::move(values);
    } else {
        throw ConfigError("sweep must be one of: afs, window, states");
    }

    fs::create_directories(cfg.out_dir);
    AblationTable table = run_ablation(cfg, spec, train_data, test_data, num_seeds);
    write_ablation_outputs(cfg.out_dir, table);
    std::cout << ablation_table_csv(table);
    return 0;
}

int run_gen_data(const CommonArgs& args, SyntheticConfig syn, double train_fraction) {
    if (args.seed.has_value()) syn.seed = *args.seed;
    syn.validate();
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw ConfigError("train fraction must be in (0, 1)");
    fs::path out_dir = args.out.empty() ? fs::path("data") : fs::path(args.out);
    fs::create_directories(out_dir);

    std::vector<FeatureSequence> sequences = generate_synthetic(syn);
    std::size_t train_count = static_cast<std::size_t>(
        static_cast<double>(sequences.size()) * train_fraction);
    if (train_count == 0 || train_count >= sequences.size())
        throw ConfigError("train fraction leaves an empty split");

    std::map<std::string, std::vector<std::string>> splits;
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        std::string file = sequences[i].name + ".lapf";
        save_sequence(sequences[i], out_dir / file);
        splits[i < train_count ? "train" : "test"].push_back(file);
    }
    Manifest::save(out_dir / "manifest.json", splits);
    std::cout << "wrote " << sequences.size() << " sequences ("
              << splits["train"].size() << " train, " << splits["test"].size()
              << " test) to " << out_dir.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming online action detection with latent-progression sampling"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string resume_from, manifest_path, input, split = "test", sweep = "afs";
    std::vector<std::size_t> sweep_values;
    std::size_t num_seeds = 3;
    SyntheticConfig syn;
    double train_fraction = 0.75;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", common.config, "JSON run configuration");
        cmd->add_option("--seed", common.seed, "Override the config seed");
        cmd->add_option("--out", common.out, "Output directory");
        cmd->add_option("--checkpoint", common.checkpoint, "Checkpoint path");
    };

    CLI::App* train = app.add_subcommand("train", "Train a model");
    add_common(train);
    train->add_option("--resume", resume_from, "Continue from this checkpoint");

    CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a split");
    add_common(eval);
    eval->add_option("--manifest", manifest_path, "Dataset manifest (defaults to the checkpoint's)");
    eval->add_option("--split", split, "Manifest split to evaluate");

    CLI::App* stream = app.add_subcommand("stream", "Stream one file frame-by-frame");
    add_common(stream);
    stream->add_option("--input", input, "Sequence file to stream")->required();

    CLI::App* ablate = app.add_subcommand("ablate", "Run an ablation sweep");
    add_common(ablate);
    ablate->add_option("--sweep", sweep, "afs | window | states");
    ablate->add_option("--values", sweep_values, "K or P values for the sweep");
    ablate->add_option("--seeds", num_seeds, "Number of seeds per variant");

    CLI::App* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset");
    add_common(gen);
    gen->add_option("--sequences", syn.num_sequences, "Sequence count");
    gen->add_option("--actions", syn.num_actions, "Action class count");
    gen->add_option("--dim", syn.feature_dim, "Feature dimension");
    gen->add_option("--noise", syn.noise_scale, "Noise scale");
    gen->add_option("--train-fraction", train_fraction, "Fraction of sequences in the train split");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // bad command line is a validation error
    }

    try {
        if (train->parsed()) return run_train(common, resume_from);
        if (eval->parsed()) return run_eval(common, manifest_path, split);
        if (stream->parsed()) return run_stream(common, input);
        if (ablate->parsed()) return run_ablate(common, sweep, sweep_values, num_seeds);
        if (gen->parsed()) return run_gen_data(common, syn, train_fraction);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
