// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "lapnet/common.hpp"

namespace lapnet {

// Frames are ranked by descending score; ties keep original frame order.
inline std::vector<std::size_t> ranking_order(const std::vector<double>& scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

// Per-frame average precision: mean of precision-at-rank over positive ranks.
// nullopt when there are no positives (class reported as skipped).
inline std::optional<double> per_frame_ap(const std::vector<double>& scores,
                                          const std::vector<bool>& positives) {
    if (scores.size() != positives.size())
        throw DimensionError("per_frame_ap size mismatch");
    std::size_t n_pos = static_cast<std::size_t>(
        std::count(positives.begin(), positives.end(), true));
    if (n_pos == 0) return std::nullopt;
    std::vector<std::size_t> order = ranking_order(scores);
    double sum = 0.0;
    std::size_t tp = 0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        if (!positives[order[rank]]) continue;
        ++tp;
        sum += static_cast<double>(tp) / static_cast<double>(rank + 1);
    }
    return sum / static_cast<double>(n_pos);
}

// Calibrated AP: precision reweighted by w = negatives/positives, so a
// background-dominated stream scores like a balanced one. With w = 1 this is
// exactly per_frame_ap.
inline std::optional<double> calibrated_ap(const std::vector<double>& scores,
                                           const std::vector<bool>& positives) {
    if (scores.size() != positives.size())
        throw DimensionError("calibrated_ap size mismatch");
    std::size_t n_pos = static_cast<std::size_t>(
        std::count(positives.begin(), positives.end(), true));
    std::size_t n_neg = scores.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;
    double w = static_cast<double>(n_neg) / static_cast<double>(n_pos);
    std::vector<std::size_t> order = ranking_order(scores);
    double sum = 0.0;
    double tp = 0.0, fp = 0.0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        if (positives[order[rank]]) {
            tp += 1.0;
            sum += tp / (tp + fp / w);
        } else {
            fp += 1.0;
        }
    }
    return sum / static_cast<double>(n_pos);
}

struct EvaluationTable {
    std::map<std::size_t, double> per_class_ap;   // action classes only
    std::map<std::size_t, double> per_class_cap;
    double map = 0.0;
    double mcap = 0.0;
    std::vector<std::size_t> skipped_classes;
    std::size_t frames = 0;
    std::size_t unlabeled_frames = 0;
};

// Sentinel for frames without ground truth; they are excluded and counted.
inline constexpr std::size_t kUnlabeledFrame = static_cast<std::size_t>(-1);

// scores[t][c]: per-frame class scores over all classes including background.
// labels[t] in [0, num_classes) or kUnlabeledFrame. Background (class 0) is
// excluded from the means.
inline EvaluationTable evaluate_frames(const std::vector<std::vector<double>>& scores,
                                       const std::vector<std::size_t>& labels,
                                       std::size_t num_classes) {
    if (scores.size() != labels.size())
        throw DimensionError("evaluate_frames needs one label per frame");
    EvaluationTable table;
    std::vector<std::size_t> kept;
    for (std::size_t t = 0; t < labels.size(); ++t) {
        if (labels[t] == kUnlabeledFrame) {
            ++table.unlabeled_frames;
            continue;
        }
        if (labels[t] >= num_classes) throw DimensionError("frame label out of range");
        kept.push_back(t);
    }
    table.frames = kept.size();
    double ap_sum = 0.0, cap_sum = 0.0;
    std::size_t ap_count = 0, cap_count = 0;
    for (std::size_t c = 1; c < num_classes; ++c) {
        std::vector<double> class_scores;
        std::vector<bool> positives;
        class_scores.reserve(kept.size());
        positives.reserve(kept.size());
        for (std::size_t t : kept) {
            class_scores.push_back(scores[t][c]);
            positives.push_back(labels[t] == c);
        }
        std::optional<double> ap = per_frame_ap(class_scores, positives);
        std::optional<double> cap = calibrated_ap(class_scores, positives);
        if (!ap.has_value()) {
            table.skipped_classes.push_back(c);
            continue;
        }
        table.per_class_ap[c] = *ap;
        ap_sum += *ap;
        ++ap_count;
        if (cap.has_value()) {
            table.per_class_cap[c] = *cap;
            cap_sum += *cap;
            ++cap_count;
        }
    }
    if (ap_count > 0) table.map = ap_sum / static_cast<double>(ap_count);
    if (cap_count > 0) table.mcap = cap_sum / static_cast<double>(cap_count);
    return table;
}

}  // namespace lapnet
