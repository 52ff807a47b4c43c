// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lapnet/cells.hpp"
#include "lapnet/checkpoint.hpp"
#include "lapnet/config.hpp"
#include "lapnet/data.hpp"
#include "lapnet/losses.hpp"
#include "lapnet/optim.hpp"

namespace lapnet {

struct SampleForward {
    TensorRef cls_loss;
    TensorRef pre_loss;
    TensorRef total;
    std::vector<StepDiagnostics> diagnostics;
};

// Runs one training sample (a run of consecutive frames) through the model on
// the given tape: hidden state and history both start zeroed, the per-frame
// recognition and prediction losses are averaged over the sample, and the
// combined objective is recognition + balance * prediction. `noise_per_frame`
// optionally pins the train-mode noise draws (gradient verification).
inline SampleForward sample_forward(
    Tape& tape, LapNetParameters& params, const FeatureSequence& seq, std::size_t start,
    std::size_t length, double balance, const StepOptions& base_options,
    const std::vector<std::vector<double>>* noise_per_frame = nullptr) {
    require(length >= 1, "sample_forward needs at least one frame");
    if (start + length > seq.frame_count)
        throw DimensionError("sample range exceeds sequence length");
    if (noise_per_frame != nullptr && noise_per_frame->size() != length)
        throw DimensionError("need one noise vector per frame");

    const ModelConfig& cfg = params.config;
    HistoryStack history(cfg.sampler.depth, cfg.feature_dim);
    TensorRef h = tape.constant(std::vector<double>(cfg.hidden_size, 0.0));

    SampleForward out;
    std::vector<TensorRef> cls_terms, pre_terms;
    cls_terms.reserve(length);
    pre_terms.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
        std::size_t t = start + i;
        StepOptions opt = base_options;
        if (noise_per_frame != nullptr) opt.fixed_noise = (*noise_per_frame)[i];
        FeatureVector frame = seq.frame(t);
        StepResult r = lapnet_step(tape, params, history, h, frame, opt);
        history.push(frame);
        h = r.h_next;
        cls_terms.push_back(loss_cls(tape, r.class_probs, seq.label(t)));
        pre_terms.push_back(loss_pre(tape, r.future_class_probs,
                                     future_labels(seq, t, cfg.sampler.depth)));
        out.diagnostics.push_back(std::move(r.diag));
    }
    out.cls_loss = tape.mean_rows(cls_terms);
    out.pre_loss = tape.mean_rows(pre_terms);
    out.total = total_loss(tape, out.cls_loss, out.pre_loss, balance);
    return out;
}

struct EpochLog {
    std::size_t epoch = 0;
    double loss_cls = 0.0;
    double loss_pre = 0.0;
    double loss_total = 0.0;
    double temperature = 0.0;
    double seconds = 0.0;
    std::size_t samples = 0;
    std::size_t skipped_sequences = 0;  // too short for this epoch's offset
};

inline std::string training_log_header() {
    return "epoch,loss_cls,loss_pre,loss_total,temperature,seconds";
}

inline std::string training_log_row(const EpochLog& log) {
    return std::to_string(log.epoch) + ',' + format_double(log.loss_cls) + ',' +
           format_double(log.loss_pre) + ',' + format_double(log.loss_total) + ',' +
           format_double(log.temperature) + ',' + format_double(log.seconds);
}

inline void write_training_log(const std::filesystem::path& path,
                               const std::vector<EpochLog>& logs) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write training log: " + path.string());
    out << training_log_header() << '\n';
    for (const EpochLog& log : logs) out << training_log_row(log) << '\n';
}

// Epoch-driven training loop. All randomness inside epoch e comes from a
// fresh generator seeded by mix(seed, e + 1), so resuming from a checkpoint
// at an epoch boundary replays the identical stream: per epoch it redraws the
// chunking offset, re-chunks every sequence, shuffles the sample order, and
// steps the optimizer once per batch on the batch-mean gradient.
class Trainer {
public:
    // Name prefixes in `frozen` are excluded from optimization (still part of
    // the forward pass). A trainer with frozen parameters cannot checkpoint.
    Trainer(const RunConfig& run, std::vector<FeatureSequence> data,
            std::vector<std::string> frozen = {})
        : run_(run), data_(std::move(data)), frozen_(std::move(frozen)) {
        run_.validate();
        if (data_.empty()) throw ConfigError("training needs at least one sequence");
        for (const FeatureSequence& s : data_) {
            s.validate();
            if (s.feature_dim != data_.front().feature_dim ||
                s.num_actions != data_.front().num_actions)
                throw DimensionError("sequences disagree on dimensions or class count");
        }
        params_ = LapNetParameters::init(
            run_.model(data_.front().feature_dim, data_.front().num_actions), run_.seed);
        attach_optimizer();
        schedule_ = run_.temperature_schedule();
    }

    // Resumes: parameters, moments, and epoch counter from the checkpoint;
    // the dataset must match the recorded dimensions.
    Trainer(const Checkpoint& ck, std::vector<FeatureSequence> data)
        : run_(ck.run), data_(std::move(data)) {
        if (data_.empty()) throw ConfigError("training needs at least one sequence");
        for (const FeatureSequence& s : data_) {
            s.validate();
            if (s.feature_dim != ck.feature_dim || s.num_actions != ck.num_actions)
                throw DimensionError("checkpoint dimensions do not match dataset");
        }
        params_ = ck.params;
        attach_optimizer();
        optimizer_.restore(ck.slots, ck.optimizer_steps);
        schedule_ = run_.temperature_schedule();
        next_epoch_ = ck.epochs_completed;
    }

    LapNetParameters& params() { return params_; }
    const RunConfig& run_config() const { return run_; }
    AdamOptimizer& optimizer() { return optimizer_; }
    std::size_t next_epoch() const { return next_epoch_; }
    std::size_t feature_dim() const { return data_.front().feature_dim; }
    std::size_t num_actions() const { return data_.front().num_actions; }
    const std::vector<EpochLog>& logs() const { return logs_; }

    EpochLog run_epoch() {
        auto t0 = std::chrono::steady_clock::now();
        std::size_t epoch = next_epoch_;
        Rng rng(Rng::mix(run_.seed, epoch + 1));
        double tau = schedule_.at(epoch);

        EpochLog log;
        log.epoch = epoch;
        log.temperature = tau;

        std::vector<TrainingSample> samples;
        for (const FeatureSequence& seq : data_) {
            std::size_t offset = 1 + rng.below(run_.sample_length);
            if (seq.frame_count < offset + run_.sample_length) {
                ++log.skipped_sequences;
                continue;
            }
            auto chunk = chunk_training_samples(seq, run_.sample_length, offset);
            samples.insert(samples.end(), chunk.begin(), chunk.end());
        }
        if (samples.empty())
            throw ConfigError("no training samples: sequences shorter than offset + sample_length");
        rng.shuffle(samples);

        StepOptions opt;
        opt.mode = StepMode::train;
        opt.temperature = tau;
        opt.rng = &rng;
        if (!params_.config.adaptive_sampling)
            opt.force_state = params_.config.sampler.states - 1;

        for (std::size_t begin = 0; begin < samples.size(); begin += run_.batch_size) {
            std::size_t end = std::min(begin + run_.batch_size, samples.size());
            for (std::size_t i = begin; i < end; ++i) {
                const TrainingSample& sample = samples[i];
                Tape tape;
                SampleForward fwd = sample_forward(tape, params_, *sample.sequence,
                                                   sample.start, sample.length,
                                                   run_.balance, opt);
                double total = tape.values(fwd.total)[0];
                if (!std::isfinite(total))
                    throw NumericError(
                        "non-finite loss at epoch " + std::to_string(epoch) + ", sample " +
                        std::to_string(i) + " of " + sample.sequence->name +
                        " (cls=" + format_double(tape.values(fwd.cls_loss)[0]) +
                        ", pre=" + format_double(tape.values(fwd.pre_loss)[0]) + ")");
                tape.backward(fwd.total);
                log.loss_cls += tape.values(fwd.cls_loss)[0];
                log.loss_pre += tape.values(fwd.pre_loss)[0];
                log.loss_total += total;
            }
            double inv = 1.0 / static_cast<double>(end - begin);
            for (Tensor* p : trainable_)
                for (double& g : p->grad) g *= inv;
            optimizer_.clip_grad_norm(run_.grad_clip);
            optimizer_.step();
            for (Tensor* p : params_.parameters()) p->zero_grad();
        }

        log.samples = samples.size();
        double inv = 1.0 / static_cast<double>(samples.size());
        log.loss_cls *= inv;
        log.loss_pre *= inv;
        log.loss_total *= inv;
        log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                          .count();
        ++next_epoch_;
        logs_.push_back(log);
        return log;
    }

    // Runs epochs until the configured count; invokes `on_epoch` after each.
    void train(const std::function<void(const EpochLog&)>& on_epoch = {}) {
        while (next_epoch_ < run_.epochs) {
            EpochLog log = run_epoch();
            if (on_epoch) on_epoch(log);
        }
    }

    void save(const std::filesystem::path& path) {
        if (!frozen_.empty())
            throw ContractError("cannot checkpoint a trainer with frozen parameters");
        save_checkpoint(path, params_, optimizer_, run_, feature_dim(), num_actions(),
                        next_epoch_);
    }

private:
    void attach_optimizer() {
        AdamOptimizer::Settings settings;
        settings.learning_rate = run_.learning_rate;
        settings.weight_decay = run_.weight_decay;
        optimizer_ = AdamOptimizer(settings);
        trainable_.clear();
        for (auto& [name, tensor] : params_.named_parameters()) {
            bool freeze = false;
            for (const std::string& prefix : frozen_)
                if (name.rfind(prefix, 0) == 0) freeze = true;
            if (!freeze) trainable_.push_back(tensor);
        }
        if (trainable_.empty()) throw ConfigError("all parameters are frozen");
        optimizer_.attach(trainable_);
    }

    RunConfig run_;
    std::vector<FeatureSequence> data_;
    std::vector<std::string> frozen_;
    LapNetParameters params_;
    AdamOptimizer optimizer_;
    std::vector<Tensor*> trainable_;
    TemperatureSchedule schedule_;
    std::size_t next_epoch_ = 0;
    std::vector<EpochLog> logs_;
};

}  // namespace lapnet
