// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "lapnet/cells.hpp"
#include "lapnet/common.hpp"
#include "lapnet/data.hpp"
#include "lapnet/gumbel.hpp"

namespace lapnet {

using Json = nlohmann::json;

// Every run-level hyperparameter. JSON configs carry exactly these keys;
// unknown keys are rejected so typos cannot silently fall back to defaults.
struct RunConfig {
    std::size_t sample_length = 64;  // frames per training sample
    std::size_t future_depth = 8;    // prediction steps / history depth
    std::size_t states = 4;          // progression state count
    std::size_t window_size = 7;     // frames aggregated per window
    std::size_t hidden_size = 64;
    double balance = 1.0;  // weight on the prediction loss
    double learning_rate = 0.0005;
    double weight_decay = 0.001;
    std::size_t batch_size = 16;
    std::size_t epochs = 30;
    double temperature_initial = 5.0;
    double temperature_floor = 0.1;
    bool adaptive_sampling = true;
    double grad_clip = 5.0;
    std::uint64_t seed = 7;
    std::string manifest;  // dataset manifest path
    std::string out_dir = "out";

    SamplerConfig sampler() const {
        SamplerConfig s;
        s.depth = future_depth;
        s.window_size = window_size;
        s.states = states;
        return s;
    }

    TemperatureSchedule temperature_schedule() const {
        return TemperatureSchedule::reach_floor_at(temperature_initial, temperature_floor,
                                                   epochs > 1 ? epochs - 1 : 1);
    }

    ModelConfig model(std::size_t feature_dim, std::size_t num_actions) const {
        ModelConfig m;
        m.feature_dim = feature_dim;
        m.hidden_size = hidden_size;
        m.num_classes = num_actions + 1;  // background + actions
        m.sampler = sampler();
        m.adaptive_sampling = adaptive_sampling;
        return m;
    }

    void validate() const {
        if (sample_length == 0) throw ConfigError("sample_length must be positive");
        if (hidden_size == 0) throw ConfigError("hidden_size must be positive");
        if (batch_size == 0) throw ConfigError("batch_size must be positive");
        if (epochs == 0) throw ConfigError("epochs must be positive");
        if (balance < 0.0) throw ConfigError("balance must be non-negative");
        if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
        if (weight_decay < 0.0) throw ConfigError("weight_decay must be non-negative");
        if (temperature_initial <= 0.0 || temperature_floor <= 0.0)
            throw ConfigError("temperatures must be positive");
        if (temperature_floor > temperature_initial)
            throw ConfigError("temperature_floor must not exceed temperature_initial");
        sampler().validate();
    }

    Json to_json() const {
        return Json{{"sample_length", sample_length},
                    {"future_depth", future_depth},
                    {"states", states},
                    {"window_size", window_size},
                    {"hidden_size", hidden_size},
                    {"balance", balance},
                    {"learning_rate", learning_rate},
                    {"weight_decay", weight_decay},
                    {"batch_size", batch_size},
                    {"epochs", epochs},
                    {"temperature_initial", temperature_initial},
                    {"temperature_floor", temperature_floor},
                    {"adaptive_sampling", adaptive_sampling},
                    {"grad_clip", grad_clip},
                    {"seed", seed},
                    {"manifest", manifest},
                    {"out_dir", out_dir}};
    }

    static RunConfig from_json(const Json& j) {
        if (!j.is_object()) throw ConfigError("config root must be a JSON object");
        RunConfig base;
        const Json known = base.to_json();
        for (const auto& [key, value] : j.items())
            if (!known.contains(key)) throw ConfigError("unknown config key: " + key);
        RunConfig cfg;
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) {
                try {
                    field = j.at(key).get<std::decay_t<decltype(field)>>();
                } catch (const Json::exception&) {
                    throw ConfigError(std::string("config key has wrong type: ") + key);
                }
            }
        };
        get("sample_length", cfg.sample_length);
        get("future_depth", cfg.future_depth);
        get("states", cfg.states);
        get("window_size", cfg.window_size);
        get("hidden_size", cfg.hidden_size);
        get("balance", cfg.balance);
        get("learning_rate", cfg.learning_rate);
        get("weight_decay", cfg.weight_decay);
        get("batch_size", cfg.batch_size);
        get("epochs", cfg.epochs);
        get("temperature_initial", cfg.temperature_initial);
        get("temperature_floor", cfg.temperature_floor);
        get("adaptive_sampling", cfg.adaptive_sampling);
        get("grad_clip", cfg.grad_clip);
        get("seed", cfg.seed);
        get("manifest", cfg.manifest);
        get("out_dir", cfg.out_dir);
        cfg.validate();
        return cfg;
    }

    static RunConfig load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config: " + path.string());
        Json j;
        try {
            in >> j;
        } catch (const Json::exception& e) {
            throw ConfigError("config is not valid JSON: " + std::string(e.what()));
        }
        return from_json(j);
    }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw Error("cannot write config: " + path.string());
        out << to_json().dump(2) << '\n';
    }
};

// Dataset manifest: named splits mapping to sequence files. Relative paths
// resolve against the manifest's own directory.
struct Manifest {
    std::map<std::string, std::vector<std::filesystem::path>> splits;

    const std::vector<std::filesystem::path>& split(const std::string& name) const {
        auto it = splits.find(name);
        if (it == splits.end()) throw ConfigError("manifest has no split named " + name);
        return it->second;
    }

    bool has_split(const std::string& name) const { return splits.count(name) > 0; }

    std::vector<FeatureSequence> load_split(const std::string& name) const {
        std::vector<FeatureSequence> out;
        for (const auto& p : split(name)) out.push_back(load_sequence(p));
        return out;
    }

    static Manifest load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open manifest: " + path.string());
        Json j;
        try {
            in >> j;
        } catch (const Json::exception& e) {
            throw ConfigError("manifest is not valid JSON: " + std::string(e.what()));
        }
        if (!j.is_object() || !j.contains("splits") || !j.at("splits").is_object())
            throw ConfigError("manifest must be an object with a \"splits\" object");
        Manifest m;
        std::filesystem::path base = path.parent_path();
        for (const auto& [name, files] : j.at("splits").items()) {
            if (!files.is_array())
                throw ConfigError("manifest split must list file paths: " + name);
            std::vector<std::filesystem::path> paths;
            for (const auto& f : files) {
                if (!f.is_string())
                    throw ConfigError("manifest paths must be strings: " + name);
                std::filesystem::path p = f.get<std::string>();
                paths.push_back(p.is_absolute() ? p : base / p);
            }
            m.splits.emplace(name, std::move(paths));
        }
        return m;
    }

    static void save(const std::filesystem::path& path,
                     const std::map<std::string, std::vector<std::string>>& splits) {
        Json s = Json::object();
        for (const auto& [name, files] : splits) s[name] = files;
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw Error("cannot write manifest: " + path.string());
        out << Json{{"splits", s}}.dump(2) << '\n';
    }
};

}  // namespace lapnet
