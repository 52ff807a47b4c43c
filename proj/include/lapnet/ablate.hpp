// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "lapnet/config.hpp"
#include "lapnet/evaluator.hpp"
#include "lapnet/trainer.hpp"

namespace lapnet {

struct ExperimentResult {
    std::uint64_t seed = 0;
    double map = 0.0;
    double mcap = 0.0;
    std::vector<double> prediction_map;
    std::vector<EpochLog> logs;
};

// One full train-then-evaluate cycle with the given config.
inline ExperimentResult run_experiment(const RunConfig& run,
                                       const std::vector<FeatureSequence>& train_data,
                                       const std::vector<FeatureSequence>& test_data) {
    Trainer trainer(run, train_data);
    trainer.train();
    EvalOutcome outcome = evaluate_model(trainer.params(), test_data);
    ExperimentResult result;
    result.seed = run.seed;
    result.map = outcome.detection.map;
    result.mcap = outcome.detection.mcap;
    result.prediction_map = outcome.prediction_map;
    result.logs = trainer.logs();
    return result;
}

enum class SweepKind { afs_on_off, window_size, states };

struct SweepSpec {
    SweepKind kind = SweepKind::afs_on_off;
    std::vector<std::size_t> values;  // K or P values; ignored for afs_on_off
};

struct AblationRow {
    std::string variant;
    std::vector<ExperimentResult> per_seed;
    double mean_map = 0.0;
    double mean_mcap = 0.0;
};

struct AblationTable {
    std::string sweep;
    std::vector<std::uint64_t> seeds;
    std::vector<AblationRow> rows;
};

// Trains and evaluates every variant of the sweep under the same seed list,
// so differences between rows are attributable to the varied knob alone.
inline AblationTable run_ablation(const RunConfig& base, const SweepSpec& spec,
                                  const std::vector<FeatureSequence>& train_data,
                                  const std::vector<FeatureSequence>& test_data,
                                  std::size_t num_seeds = 3) {
    require(num_seeds >= 1, "ablation needs at least one seed");
    AblationTable table;
    for (std::size_t i = 0; i < num_seeds; ++i)
        table.seeds.push_back(base.seed + i);

    std::vector<std::pair<std::string, RunConfig>> variants;
    switch (spec.kind) {
        case SweepKind::afs_on_off: {
            table.sweep = "afs_on_off";
            RunConfig with = base;
            with.adaptive_sampling = true;
            RunConfig without = base;
            without.adaptive_sampling = false;
            variants.emplace_back("with_afs", with);
            variants.emplace_back("without_afs", without);
            break;
        }
        case SweepKind::window_size: {
            table.sweep = "window_size";
            if (spec.values.empty()) throw ConfigError("window size sweep needs values");
            for (std::size_t k : spec.values) {
                RunConfig cfg = base;
                cfg.window_size = k;
                variants.emplace_back("K=" + std::to_string(k), cfg);
            }
            break;
        }
        case SweepKind::states: {
            table.sweep = "states";
            if (spec.values.empty()) throw ConfigError("state sweep needs values");
            for (std::size_t p : spec.values) {
                RunConfig cfg = base;
                cfg.states = p;
                variants.emplace_back("P=" + std::to_string(p), cfg);
            }
            break;
        }
    }

    for (auto& [name, cfg] : variants) {
        cfg.validate();
        AblationRow row;
        row.variant = name;
        for (std::uint64_t seed : table.seeds) {
            RunConfig seeded = cfg;
            seeded.seed = seed;
            row.per_seed.push_back(run_experiment(seeded, train_data, test_data));
            row.mean_map += row.per_seed.back().map;
            row.mean_mcap += row.per_seed.back().mcap;
        }
        row.mean_map /= static_cast<double>(table.seeds.size());
        row.mean_mcap /= static_cast<double>(table.seeds.size());
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline std::string ablation_table_csv(const AblationTable& table) {
    std::string out = "variant";
    for (std::uint64_t seed : table.seeds) out += ",map_seed_" + std::to_string(seed);
    out += ",mean_map,mean_mcap\n";
    for (const AblationRow& row : table.rows) {
        out += row.variant;
        for (const ExperimentResult& r : row.per_seed) out += ',' + format_double(r.map);
        out += ',' + format_double(row.mean_map) + ',' + format_double(row.mean_mcap) + '\n';
    }
    return out;
}

inline Json ablation_table_json(const AblationTable& table) {
    Json rows = Json::array();
    for (const AblationRow& row : table.rows) {
        Json per_seed = Json::array();
        for (const ExperimentResult& r : row.per_seed)
            per_seed.push_back(Json{{"seed", r.seed},
                                    {"map", r.map},
                                    {"mcap", r.mcap},
                                    {"prediction_map_per_step", r.prediction_map}});
        rows.push_back(Json{{"variant", row.variant},
                            {"per_seed", per_seed},
                            {"mean_map", row.mean_map},
                            {"mean_mcap", row.mean_mcap}});
    }
    return Json{{"sweep", table.sweep}, {"seeds", table.seeds}, {"rows", rows}};
}

inline void write_ablation_outputs(const std::filesystem::path& dir,
                                   const AblationTable& table) {
    std::ofstream csv(dir / "ablation.csv", std::ios::trunc);
    if (!csv) throw Error("cannot write ablation table");
    csv << ablation_table_csv(table);
    std::ofstream js(dir / "ablation.json", std::ios::trunc);
    if (!js) throw Error("cannot write ablation json");
    js << ablation_table_json(table).dump(2) << '\n';
}

}  // namespace lapnet
