// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lapnet/cells.hpp"
#include "lapnet/config.hpp"
#include "lapnet/data.hpp"
#include "lapnet/metrics.hpp"

namespace lapnet {

// Everything recorded while streaming one sequence in eval mode. Labels are
// copied for the metric stage only; the forward pass never sees them.
struct SequenceEvalRecord {
    std::string name;
    std::vector<std::size_t> labels;
    std::vector<std::size_t> sampled_states;            // chosen progression state
    std::vector<std::vector<double>> class_probs;       // frame x class
    std::vector<std::vector<std::vector<double>>> future_probs;  // frame x step x class
};

struct EvalOutcome {
    EvaluationTable detection;
    std::vector<double> prediction_map;  // frame mAP of the step-i prediction
    std::vector<SequenceEvalRecord> records;
    std::size_t total_frames = 0;
};

inline SequenceEvalRecord stream_sequence_record(LapNetParameters& params,
                                                 const FeatureSequence& seq) {
    if (seq.feature_dim != params.config.feature_dim)
        throw DimensionError("sequence feature dimension does not match model");
    if (seq.num_actions + 1 != params.config.num_classes)
        throw DimensionError("sequence class count does not match model");
    SequenceEvalRecord rec;
    rec.name = seq.name;
    StreamState state(params);
    for (std::size_t t = 0; t < seq.frame_count; ++t) {
        auto out = state.step(seq.frame(t), StepMode::eval);
        rec.class_probs.push_back(std::move(out.class_probs));
        rec.future_probs.push_back(std::move(out.future_class_probs));
        rec.sampled_states.push_back(out.diag.hard_state);
        rec.labels.push_back(seq.label(t));
    }
    return rec;
}

inline EvalOutcome evaluate_model(LapNetParameters& params,
                                  const std::vector<FeatureSequence>& sequences) {
    if (sequences.empty()) throw ConfigError("evaluation needs at least one sequence");
    EvalOutcome out;
    for (const FeatureSequence& seq : sequences)
        out.records.push_back(stream_sequence_record(params, seq));

    std::size_t num_classes = params.config.num_classes;
    std::size_t depth = params.config.sampler.depth;
    std::vector<std::vector<double>> scores;
    std::vector<std::size_t> labels;
    for (const SequenceEvalRecord& rec : out.records) {
        scores.insert(scores.end(), rec.class_probs.begin(), rec.class_probs.end());
        labels.insert(labels.end(), rec.labels.begin(), rec.labels.end());
    }
    out.total_frames = labels.size();
    out.detection = evaluate_frames(scores, labels, num_classes);

    // Step-i prediction made at frame t targets the label of frame t + i
    // (clamped to the final frame, matching the training-time rule).
    out.prediction_map.reserve(depth);
    for (std::size_t step = 0; step < depth; ++step) {
        std::vector<std::vector<double>> step_scores;
        std::vector<std::size_t> step_labels;
        for (const SequenceEvalRecord& rec : out.records) {
            std::size_t frames = rec.labels.size();
            for (std::size_t t = 0; t < frames; ++t) {
                step_scores.push_back(rec.future_probs[t][step]);
                std::size_t target = t + step;
                if (target >= frames) target = frames - 1;
                step_labels.push_back(rec.labels[target]);
            }
        }
        out.prediction_map.push_back(
            evaluate_frames(step_scores, step_labels, num_classes).map);
    }
    return out;
}

inline Json metrics_to_json(const EvalOutcome& outcome) {
    const EvaluationTable& t = outcome.detection;
    Json per_ap = Json::object();
    for (const auto& [cls, ap] : t.per_class_ap) per_ap[std::to_string(cls)] = ap;
    Json per_cap = Json::object();
    for (const auto& [cls, cap] : t.per_class_cap) per_cap[std::to_string(cls)] = cap;
    return Json{{"map", t.map},
                {"mcap", t.mcap},
                {"per_class_ap", per_ap},
                {"per_class_cap", per_cap},
                {"skipped_classes", t.skipped_classes},
                {"frames", t.frames},
                {"unlabeled_frames", t.unlabeled_frames},
                {"prediction_map_per_step", outcome.prediction_map}};
}

inline void write_metrics_json(const std::filesystem::path& path,
                               const EvalOutcome& outcome) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write metrics: " + path.string());
    out << metrics_to_json(outcome).dump(2) << '\n';
}

// Per-frame dump: one row per streamed frame with the chosen progression
// state and the class distribution.
inline void write_per_frame_csv(const std::filesystem::path& path,
                                const EvalOutcome& outcome, std::size_t num_classes) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write per-frame dump: " + path.string());
    out << "sequence,frame,label,sampled_state";
    for (std::size_t c = 0; c < num_classes; ++c) out << ",prob_" << c;
    out << '\n';
    for (const SequenceEvalRecord& rec : outcome.records) {
        for (std::size_t t = 0; t < rec.labels.size(); ++t) {
            out << rec.name << ',' << t << ',' << rec.labels[t] << ','
                << rec.sampled_states[t];
            for (double p : rec.class_probs[t]) out << ',' << format_double(p);
            out << '\n';
        }
    }
}

// Pull-based frame source that can prove the online contract: it counts how
// many frames have been handed out, so a driver can assert that output t was
// emitted before frame t + 1 was requested.
class SingleFrameReader {
public:
    explicit SingleFrameReader(const FeatureSequence& seq) : seq_(&seq) {}

    std::optional<FeatureVector> next() {
        if (cursor_ >= seq_->frame_count) return std::nullopt;
        return seq_->frame(cursor_++);
    }

    std::size_t frames_read() const { return cursor_; }
    std::size_t frame_count() const { return seq_->frame_count; }

private:
    const FeatureSequence* seq_;
    std::size_t cursor_ = 0;
};

// Streams a sequence strictly frame-by-frame: for each frame the emit
// callback fires before the next frame is pulled from the reader. The
// callback receives (frame index, frames_read at emission time, class
// probabilities), so instrumentation can verify frames_read == index + 1.
inline std::size_t drive_stream(
    LapNetParameters& params, SingleFrameReader& reader,
    const std::function<void(std::size_t, std::size_t, const std::vector<double>&)>&
        emit) {
    StreamState state(params);
    std::size_t index = 0;
    while (auto frame = reader.next()) {
        if (frame->size() != params.config.feature_dim)
            throw DimensionError("malformed input frame");
        auto out = state.step(*frame, StepMode::eval);
        emit(index, reader.frames_read(), out.class_probs);
        ++index;
    }
    return index;
}

}  // namespace lapnet
